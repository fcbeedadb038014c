//! Generational search over feature maps.
//!
//! Each generation is scored, the elite is refined by alignment ascent over
//! the α vector, and the remaining slots are refilled by crossover and
//! mutation. Random draws for slot `s` of generation `g` come from streams
//! derived from `(masterSeed, purpose, g, s)`.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};
use crate::fitness::{alignment_of, max_eigen_fitness, LabelVector};
use crate::qkernel::{gram_matrix, GramMatrix};
use crate::rng::{self, tag};
use crate::sim::{FeatureMap, Gene, Pauli, PauliWord, MAX_QUBITS};

const GRADIENT_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;

/// Score used to rank individuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    #[default]
    MaxEigen,
    Alignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct LocalOptConfig {
    pub max_iterations: usize,
    pub fd_step: f64,
    pub initial_step_size: f64,
}

impl Default for LocalOptConfig {
    fn default() -> Self {
        Self { max_iterations: 20, fd_step: 1e-4, initial_step_size: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub maximum_generations: usize,
    pub target_fitness: f64,
    pub qubit_size: usize,
    pub gene_chain_size: usize,
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_percentage: f64,
    pub elite_size: usize,
    /// Must equal `qubit_size` when given.
    pub quantum_dim: Option<usize>,
    pub master_seed: u64,
    pub selection: Selection,
    pub local_opt: LocalOptConfig,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            maximum_generations: 50,
            target_fitness: 1.0,
            qubit_size: 2,
            gene_chain_size: 4,
            population_size: 10,
            crossover_rate: 0.7,
            mutation_percentage: 0.1,
            elite_size: 2,
            quantum_dim: None,
            master_seed: 0,
            selection: Selection::MaxEigen,
            local_opt: LocalOptConfig::default(),
        }
    }
}

fn config_err(msg: String) -> Result<()> {
    Err(SqsError::Config(msg))
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maximum_generations == 0 {
            return config_err("maximumGenerations must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.target_fitness) {
            return config_err(format!("targetFitness must lie in [0, 1], got {}", self.target_fitness));
        }
        if !(1..=MAX_QUBITS).contains(&self.qubit_size) {
            return config_err(format!("qubitSize must be in 1..={MAX_QUBITS}, got {}", self.qubit_size));
        }
        if let Some(q) = self.quantum_dim {
            if q != self.qubit_size {
                return config_err(format!("quantumDim ({q}) must equal qubitSize ({})", self.qubit_size));
            }
        }
        if self.gene_chain_size == 0 {
            return config_err("geneChainSize must be positive".into());
        }
        if self.population_size == 0 {
            return config_err("populationSize must be positive".into());
        }
        if self.elite_size < 2 || self.elite_size > self.population_size {
            return config_err(format!(
                "eliteSize must satisfy 2 ≤ eliteSize ≤ populationSize ({}), got {}",
                self.population_size, self.elite_size
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return config_err(format!("crossoverRate must lie in [0, 1], got {}", self.crossover_rate));
        }
        if !(0.0..=1.0).contains(&self.mutation_percentage) {
            return config_err(format!("mutationPercentage must lie in [0, 1], got {}", self.mutation_percentage));
        }
        let lo = &self.local_opt;
        if !(lo.fd_step > 0.0 && lo.fd_step.is_finite()) {
            return config_err(format!("localOpt.fdStep must be positive, got {}", lo.fd_step));
        }
        if !(lo.initial_step_size > 0.0 && lo.initial_step_size.is_finite()) {
            return config_err(format!("localOpt.initialStepSize must be positive, got {}", lo.initial_step_size));
        }
        Ok(())
    }

    /// Seed of the power-iteration start vector used for every fitness evaluation.
    pub fn fitness_seed(&self) -> u64 {
        rng::derive_seed(self.master_seed, &[tag::POWER_ITERATION])
    }
}

/// Individuals plus their scores once evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub individuals: Vec<FeatureMap>,
    pub fitness: Option<Vec<f64>>,
}

impl Population {
    pub fn unscored(individuals: Vec<FeatureMap>) -> Self {
        Self { individuals, fitness: None }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }
}

fn random_word(qubits: usize, rng: &mut ChaCha8Rng) -> PauliWord {
    loop {
        let letters: Vec<Pauli> = (0..qubits).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
        if let Ok(w) = PauliWord::new(letters) {
            return w;
        }
    }
}

fn random_individual(cfg: &EvolutionConfig, rng: &mut ChaCha8Rng) -> FeatureMap {
    let len = rng.random_range(1..=cfg.gene_chain_size);
    let genes = (0..len)
        .map(|_| {
            let word = random_word(cfg.qubit_size, rng);
            let alpha = rng.random_range(0.1..=2.0);
            Gene { word, alpha }
        })
        .collect();
    FeatureMap::new(cfg.qubit_size, genes).expect("random individual is valid")
}

/// Draws `populationSize` random individuals; slot `s` uses the stream `(seed, INIT, s)`.
pub fn init_population(cfg: &EvolutionConfig, seed: u64) -> Result<Population> {
    cfg.validate()?;
    let individuals = (0..cfg.population_size)
        .map(|s| random_individual(cfg, &mut rng::stream(seed, &[tag::INIT, s as u64])))
        .collect();
    Ok(Population::unscored(individuals))
}

/// Fitness and alignment of one individual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub fitness: f64,
    pub alignment: f64,
}

fn check_rows(rows: &[Vec<f64>], y: &LabelVector, qubits: usize) -> Result<()> {
    if rows.len() != y.len() {
        return Err(SqsError::Dimension { expected: rows.len(), got: y.len() });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != qubits) {
        return Err(SqsError::Dimension { expected: qubits, got: r.len() });
    }
    Ok(())
}

/// Scores a single individual under `selection`.
pub fn score_individual(
    fm: &FeatureMap,
    rows: &[Vec<f64>],
    y: &LabelVector,
    selection: Selection,
    fitness_seed: u64,
) -> Result<Score> {
    let gram = gram_matrix(fm, rows)?;
    let alignment = alignment_of(gram.as_matrix(), y)?;
    let fitness = match selection {
        Selection::MaxEigen => max_eigen_fitness(&gram, fitness_seed)?,
        Selection::Alignment => alignment,
    };
    Ok(Score { fitness, alignment })
}

fn score_all(
    pop: &[FeatureMap],
    rows: &[Vec<f64>],
    y: &LabelVector,
    selection: Selection,
    fitness_seed: u64,
) -> Result<Vec<Score>> {
    pop.par_iter()
        .enumerate()
        .map(|(i, fm)| {
            check_rows(rows, y, fm.qubits())
                .and_then(|_| score_individual(fm, rows, y, selection, fitness_seed))
                .map_err(|e| SqsError::Individual { index: i, source: Box::new(e) })
        })
        .collect()
}

/// Fitness of every individual, in population order.
pub fn evaluate_population(
    pop: &Population,
    rows: &[Vec<f64>],
    y: &LabelVector,
    selection: Selection,
    fitness_seed: u64,
) -> Result<Vec<f64>> {
    Ok(score_all(&pop.individuals, rows, y, selection, fitness_seed)?
        .into_iter()
        .map(|s| s.fitness)
        .collect())
}

/// Indices of the `elite_size` fittest individuals, best first; ties favour the lower index.
pub fn select_elite(fitness: &[f64], elite_size: usize) -> Result<Vec<usize>> {
    if elite_size > fitness.len() {
        return Err(SqsError::Usage(format!(
            "elite size {elite_size} exceeds population size {}",
            fitness.len()
        )));
    }
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    idx.truncate(elite_size);
    Ok(idx)
}

fn alignment_at(fm: &FeatureMap, alphas: &[f64], rows: &[Vec<f64>], y: &LabelVector) -> Result<f64> {
    let numeric = |detail: String| SqsError::Numeric(format!("alignment is not finite at α = {alphas:?}: {detail}"));
    let candidate = fm.with_alphas(alphas).map_err(|e| numeric(e.to_string()))?;
    let gram: GramMatrix = gram_matrix(&candidate, rows)?;
    let a = alignment_of(gram.as_matrix(), y).map_err(|e| match e {
        SqsError::Numeric(m) => numeric(m),
        other => other,
    })?;
    if a.is_finite() {
        Ok(a)
    } else {
        Err(numeric(format!("{a}")))
    }
}

/// Central finite-difference gradient of the alignment with respect to α.
pub fn alignment_gradient(
    fm: &FeatureMap,
    alphas: &[f64],
    rows: &[Vec<f64>],
    y: &LabelVector,
    step: f64,
) -> Result<Vec<f64>> {
    (0..alphas.len())
        .map(|i| {
            let mut plus = alphas.to_vec();
            let mut minus = alphas.to_vec();
            plus[i] += step;
            minus[i] -= step;
            Ok((alignment_at(fm, &plus, rows, y)? - alignment_at(fm, &minus, rows, y)?) / (2.0 * step))
        })
        .collect()
}

/// Outcome of [`local_optimize_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptOutcome {
    pub individual: FeatureMap,
    pub initial_alignment: f64,
    pub final_alignment: f64,
    pub iterations: usize,
}

/// Gradient ascent on alignment over α with backtracking; words are left untouched.
pub fn local_optimize(ind: &FeatureMap, rows: &[Vec<f64>], y: &LabelVector, opts: &LocalOptConfig) -> Result<FeatureMap> {
    Ok(local_optimize_traced(ind, rows, y, opts)?.individual)
}

pub fn local_optimize_traced(
    ind: &FeatureMap,
    rows: &[Vec<f64>],
    y: &LabelVector,
    opts: &LocalOptConfig,
) -> Result<LocalOptOutcome> {
    check_rows(rows, y, ind.qubits())?;
    let mut alphas = ind.alphas();
    let initial = alignment_at(ind, &alphas, rows, y)?;
    let mut current = initial;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let grad = alignment_gradient(ind, &alphas, rows, y, opts.fd_step)?;
        if grad.iter().fold(0.0_f64, |m, g| m.max(g.abs())) < GRADIENT_TOL {
            break;
        }
        iterations += 1;
        let mut step = opts.initial_step_size;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> = alphas.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
            let value = alignment_at(ind, &candidate, rows, y)?;
            if value > current {
                alphas = candidate;
                current = value;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(LocalOptOutcome {
        individual: ind.with_alphas(&alphas)?,
        initial_alignment: initial,
        final_alignment: current,
        iterations,
    })
}

/// Single-point splice: `a[..cut_a] ++ b[cut_b..]`, truncated to `max_len` genes.
pub fn splice(a: &FeatureMap, b: &FeatureMap, cut_a: usize, cut_b: usize, max_len: usize) -> Result<FeatureMap> {
    if cut_a == 0 || cut_a > a.genes().len() || cut_b >= b.genes().len() {
        return Err(SqsError::Usage(format!(
            "cut points ({cut_a}, {cut_b}) out of range for chains of length {} and {}",
            a.genes().len(),
            b.genes().len()
        )));
    }
    let genes: Vec<Gene> = a.genes()[..cut_a]
        .iter()
        .chain(&b.genes()[cut_b..])
        .take(max_len.max(1))
        .cloned()
        .collect();
    FeatureMap::new(a.qubits(), genes)
}

fn breed(elite: &[FeatureMap], crossover_rate: f64, gene_chain_size: usize, rng: &mut ChaCha8Rng) -> Result<FeatureMap> {
    let e = elite.len();
    let i = rng.random_range(0..e);
    let mut j = rng.random_range(0..e - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (&elite[i], &elite[j]);
    if rng.random::<f64>() < crossover_rate {
        let cut_a = rng.random_range(1..=a.genes().len());
        let cut_b = rng.random_range(0..b.genes().len());
        splice(a, b, cut_a, cut_b, gene_chain_size)
    } else {
        Ok(a.clone())
    }
}

/// Builds the next population: elite first, then children of two distinct elite parents.
/// Child slot `s` draws from the stream `(seed, CROSSOVER, generation, s)`.
pub fn crossover(
    elite: &[FeatureMap],
    population_size: usize,
    crossover_rate: f64,
    gene_chain_size: usize,
    seed: u64,
    generation: usize,
) -> Result<Vec<FeatureMap>> {
    if elite.len() < 2 {
        return Err(SqsError::Usage(format!("crossover needs at least two elite parents, got {}", elite.len())));
    }
    let mut next: Vec<FeatureMap> = elite.iter().take(population_size).cloned().collect();
    for s in next.len()..population_size {
        let mut r = rng::stream(seed, &[tag::CROSSOVER, generation as u64, s as u64]);
        next.push(breed(elite, crossover_rate, gene_chain_size, &mut r)?);
    }
    Ok(next)
}

fn mutate_letter(word: &PauliWord, rng: &mut ChaCha8Rng) -> PauliWord {
    loop {
        let mut letters = word.letters().to_vec();
        let pos = rng.random_range(0..letters.len());
        let others: Vec<Pauli> = Pauli::ALL.into_iter().filter(|&p| p != letters[pos]).collect();
        letters[pos] = others[rng.random_range(0..others.len())];
        if let Ok(w) = PauliWord::new(letters) {
            return w;
        }
    }
}

/// Each gene mutates with probability `rate`: either one letter changes or α is rescaled by U[0.5, 2].
pub fn mutate(ind: &FeatureMap, rate: f64, rng: &mut ChaCha8Rng) -> FeatureMap {
    let genes = ind
        .genes()
        .iter()
        .map(|g| {
            if rng.random::<f64>() >= rate {
                return g.clone();
            }
            if rng.random_bool(0.5) {
                Gene { word: mutate_letter(&g.word, rng), alpha: g.alpha }
            } else {
                Gene { word: g.word.clone(), alpha: g.alpha * rng.random_range(0.5..=2.0) }
            }
        })
        .collect();
    FeatureMap::new(ind.qubits(), genes).expect("mutation keeps individuals valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteSnapshot {
    pub index: usize,
    pub fitness: f64,
    pub alignment: f64,
    pub feature_map: FeatureMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best fitness seen so far, including this generation.
    pub best_fitness: f64,
    pub generation_best_fitness: f64,
    pub mean_fitness: f64,
    pub best_alignment: f64,
    pub elite: Vec<EliteSnapshot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TargetReached,
    GenerationsExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub stop_reason: StopReason,
    pub generations_run: usize,
    pub selection: Selection,
    pub fitness_seed: u64,
    pub best_individual: FeatureMap,
    pub final_fitness: f64,
    pub final_alignment: f64,
    pub entangling_blocks: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub generations: Vec<GenerationRecord>,
    pub summary: RunSummary,
}

impl EvolutionReport {
    /// Copy with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.summary.wall_time_secs = 0.0;
        r
    }

    /// One JSON object per generation.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for g in &self.generations {
            out.push_str(&serde_json::to_string(g)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Runs the search on a reduced dataset whose column count equals `qubitSize`.
pub fn run(cfg: &EvolutionConfig, rows: &[Vec<f64>], y: &LabelVector) -> Result<(FeatureMap, EvolutionReport)> {
    let started = Instant::now();
    cfg.validate()?;
    check_rows(rows, y, cfg.qubit_size)?;
    y.require_both_classes()?;
    let seed = cfg.master_seed;
    let fitness_seed = cfg.fitness_seed();
    let mut individuals = init_population(cfg, seed)?.individuals;
    let mut records = Vec::new();
    let mut best: Option<(f64, FeatureMap)> = None;
    let mut stop_reason = StopReason::GenerationsExhausted;

    for generation in 0..cfg.maximum_generations {
        let annotate = |e: SqsError| SqsError::Generation { generation, source: Box::new(e) };
        let scores = score_all(&individuals, rows, y, cfg.selection, fitness_seed).map_err(annotate)?;
        let fitness: Vec<f64> = scores.iter().map(|s| s.fitness).collect();
        let elite_idx = select_elite(&fitness, cfg.elite_size).map_err(annotate)?;
        let top = elite_idx[0];
        if best.as_ref().is_none_or(|(f, _)| fitness[top] > *f) {
            best = Some((fitness[top], individuals[top].clone()));
        }
        let best_fitness = best.as_ref().map(|b| b.0).expect("best set after first generation");
        records.push(GenerationRecord {
            generation,
            best_fitness,
            generation_best_fitness: fitness[top],
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            best_alignment: scores.iter().map(|s| s.alignment).fold(f64::NEG_INFINITY, f64::max),
            elite: elite_idx
                .iter()
                .map(|&i| EliteSnapshot {
                    index: i,
                    fitness: fitness[i],
                    alignment: scores[i].alignment,
                    feature_map: individuals[i].clone(),
                })
                .collect(),
        });
        if best_fitness >= cfg.target_fitness {
            stop_reason = StopReason::TargetReached;
            break;
        }
        if generation + 1 == cfg.maximum_generations {
            break;
        }
        let elite: Vec<FeatureMap> = elite_idx
            .par_iter()
            .map(|&i| local_optimize(&individuals[i], rows, y, &cfg.local_opt))
            .collect::<Result<_>>()
            .map_err(annotate)?;
        let mut next = crossover(&elite, cfg.population_size, cfg.crossover_rate, cfg.gene_chain_size, seed, generation)
            .map_err(annotate)?;
        for (s, ind) in next.iter_mut().enumerate().skip(elite.len()) {
            let mut r = rng::stream(seed, &[tag::MUTATION, generation as u64, s as u64]);
            *ind = mutate(ind, cfg.mutation_percentage, &mut r);
        }
        individuals = next;
    }

    let generations_run = records.len();
    let (_, best_ind) = best.expect("at least one generation runs");
    let last = generations_run - 1;
    let refined = local_optimize(&best_ind, rows, y, &cfg.local_opt)
        .map_err(|e| SqsError::Generation { generation: last, source: Box::new(e) })?;
    let final_score = score_individual(&refined, rows, y, cfg.selection, fitness_seed)
        .map_err(|e| SqsError::Generation { generation: last, source: Box::new(e) })?;
    let summary = RunSummary {
        stop_reason,
        generations_run,
        selection: cfg.selection,
        fitness_seed,
        entangling_blocks: refined.entangling_blocks(),
        best_individual: refined.clone(),
        final_fitness: final_score.fitness,
        final_alignment: final_score.alignment,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok((refined, EvolutionReport { generations: records, summary }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pop: usize, gens: usize, qubits: usize) -> EvolutionConfig {
        EvolutionConfig {
            population_size: pop,
            maximum_generations: gens,
            qubit_size: qubits,
            gene_chain_size: 3,
            elite_size: 2,
            ..EvolutionConfig::default()
        }
    }

    fn toy(n: usize) -> (Vec<Vec<f64>>, LabelVector) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![s + 0.05 * i as f64 / n as f64, 0.3 * s - 0.02 * i as f64 / n as f64]
            })
            .collect();
        let y = LabelVector::from_bools(&(0..n).map(|i| i % 2 == 0).collect::<Vec<_>>());
        (rows, y)
    }

    fn fm(words: &[(&str, f64)]) -> FeatureMap {
        let genes = words.iter().map(|(w, a)| Gene::parse(w, *a).unwrap()).collect();
        FeatureMap::new(words[0].0.len(), genes).unwrap()
    }

    #[test]
    fn init_population_contract() {
        let c = cfg(10, 1, 3);
        let p = init_population(&c, 4).unwrap();
        assert_eq!(p.len(), 10);
        for ind in &p.individuals {
            assert!((1..=3).contains(&ind.genes().len()));
            assert!(ind.genes().iter().all(|g| g.word.len() == 3 && (0.1..=2.0).contains(&g.alpha)));
        }
        assert_eq!(p, init_population(&c, 4).unwrap());
        let one = EvolutionConfig { gene_chain_size: 1, ..c };
        assert!(init_population(&one, 4).unwrap().individuals.iter().all(|i| i.genes().len() == 1));
    }

    #[test]
    fn config_validation() {
        assert!(cfg(10, 1, 2).validate().is_ok());
        assert!(EvolutionConfig { elite_size: 1, ..cfg(10, 1, 2) }.validate().is_err());
        assert!(EvolutionConfig { elite_size: 11, ..cfg(10, 1, 2) }.validate().is_err());
        assert!(EvolutionConfig { quantum_dim: Some(3), ..cfg(10, 1, 2) }.validate().is_err());
        assert!(EvolutionConfig { qubit_size: 11, ..cfg(10, 1, 2) }.validate().is_err());
        let strict = serde_json::from_str::<EvolutionConfig>(r#"{"populationSize": 4, "elitesize": 2}"#);
        assert!(strict.is_err());
        let parsed: EvolutionConfig =
            serde_json::from_str(r#"{"populationSize": 4, "selection": "alignment", "localOpt": {"fdStep": 0.001}}"#).unwrap();
        assert_eq!(parsed.population_size, 4);
        assert_eq!(parsed.selection, Selection::Alignment);
        assert_eq!(parsed.local_opt.fd_step, 0.001);
    }

    #[test]
    fn identical_rows_give_unit_fitness() {
        let rows = vec![vec![0.4, -0.2]; 6];
        let y = LabelVector::from_bools(&[true, false, true, false, true, false]);
        let pop = Population::unscored(vec![fm(&[("ZZ", 0.7)]), fm(&[("XY", 1.1), ("ZI", 0.3)]), fm(&[("ZZ", 0.7)])]);
        let f = evaluate_population(&pop, &rows, &y, Selection::MaxEigen, 0).unwrap();
        assert!(f.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let (rows, y) = toy(12);
        let f = evaluate_population(&pop, &rows, &y, Selection::MaxEigen, 0).unwrap();
        assert_eq!(f[0], f[2]);
    }

    #[test]
    fn evaluation_errors_name_the_individual() {
        let (rows, y) = toy(6);
        let pop = Population::unscored(vec![fm(&[("ZZ", 0.7)]), fm(&[("ZZZ", 0.7)])]);
        match evaluate_population(&pop, &rows, &y, Selection::MaxEigen, 0) {
            Err(SqsError::Individual { index: 1, source }) => assert!(matches!(*source, SqsError::Dimension { .. })),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn elite_selection_examples() {
        assert_eq!(select_elite(&[0.2, 0.9, 0.5], 2).unwrap(), vec![1, 2]);
        assert_eq!(select_elite(&[0.4, 0.4, 0.4], 2).unwrap(), vec![0, 1]);
        assert_eq!(select_elite(&[0.1, 0.3, 0.2], 3).unwrap(), vec![1, 2, 0]);
        assert!(matches!(select_elite(&[0.1], 2), Err(SqsError::Usage(_))));
    }

    #[test]
    fn splice_example() {
        let a = fm(&[("ZI", 1.0), ("IZ", 2.0), ("ZZ", 3.0)]);
        let b = fm(&[("XI", 4.0), ("IX", 5.0)]);
        let child = splice(&a, &b, 1, 1, 5).unwrap();
        assert_eq!(child, fm(&[("ZI", 1.0), ("IX", 5.0)]));
        assert_eq!(splice(&a, &b, 3, 0, 4).unwrap().genes().len(), 4);
    }

    #[test]
    fn crossover_contract() {
        let elite = vec![fm(&[("ZI", 1.0)]), fm(&[("IZ", 2.0), ("XX", 0.5)])];
        let next = crossover(&elite, 9, 0.0, 3, 7, 0).unwrap();
        assert_eq!(next.len(), 9);
        assert_eq!(&next[..2], &elite[..]);
        assert!(next.iter().all(|c| elite.contains(c)));
        let mixed = crossover(&elite, 30, 1.0, 2, 7, 3).unwrap();
        assert!(mixed.iter().all(|c| c.genes().len() <= 2));
        assert!(matches!(crossover(&elite[..1], 4, 0.5, 3, 0, 0), Err(SqsError::Usage(_))));
    }

    #[test]
    fn mutation_rules() {
        let ind = fm(&[("ZI", 1.0), ("XY", 0.5)]);
        let mut r = rng::stream(1, &[0]);
        assert_eq!(mutate(&ind, 0.0, &mut r), ind);
        let single = fm(&[("Z", 1.0)]);
        for s in 0..200 {
            let out = mutate(&single, 1.0, &mut rng::stream(s, &[0]));
            let g = &out.genes()[0];
            let word_changed = g.word != single.genes()[0].word;
            let alpha_changed = g.alpha != 1.0;
            assert!(word_changed ^ alpha_changed);
            assert_ne!(g.word.to_string(), "I");
            assert!((0.5..=2.0).contains(&g.alpha));
        }
    }

    #[test]
    fn local_optimize_is_monotone_and_stationary_points_stay_put() {
        let (rows, y) = toy(10);
        let ind = fm(&[("ZI", 0.3), ("IZ", 0.2)]);
        let out = local_optimize_traced(&ind, &rows, &y, &LocalOptConfig::default()).unwrap();
        assert!(out.final_alignment >= out.initial_alignment - 1e-12);
        assert!(out.final_alignment > out.initial_alignment);
        // X rotations leave |+⟩ invariant, so α has no effect
        let flat = fm(&[("XI", 0.3)]);
        assert_eq!(local_optimize(&flat, &rows, &y, &LocalOptConfig::default()).unwrap(), flat);
    }

    #[test]
    fn run_stops_on_target_and_respects_generation_budget() {
        let (rows, y) = toy(10);
        let (_, report) = run(&EvolutionConfig { target_fitness: 0.0, ..cfg(6, 5, 2) }, &rows, &y).unwrap();
        assert_eq!(report.generations.len(), 1);
        assert_eq!(report.summary.stop_reason, StopReason::TargetReached);
        let (_, report) = run(&EvolutionConfig { target_fitness: 1.0, ..cfg(6, 1, 2) }, &rows, &y).unwrap();
        assert_eq!(report.generations.len(), 1);
    }

    #[test]
    fn run_is_deterministic_and_monotone() {
        let (rows, y) = toy(12);
        let c = EvolutionConfig { master_seed: 11, selection: Selection::Alignment, ..cfg(8, 4, 2) };
        let (best, a) = run(&c, &rows, &y).unwrap();
        let (_, b) = run(&c, &rows, &y).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
        assert!(a.generations.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
        let rescored = score_individual(&best, &rows, &y, c.selection, c.fitness_seed()).unwrap();
        assert_eq!(rescored.alignment, a.summary.final_alignment);
        assert_eq!(a.to_json_lines().unwrap().lines().count(), a.generations.len());
    }
}
