use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sqs_core::evolution::{
    alignment_gradient, evaluate_population, init_population, local_optimize_traced, run, score_individual,
    EvolutionConfig, LocalOptConfig, Population, Selection,
};
use sqs_core::fitness::alignment_of;
use sqs_core::qkernel::gram_matrix;
use sqs_core::{FeatureMap, Gene, LabelVector};

fn two_clusters_1d(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, LabelVector) {
    let n = rng.random_range(16..40);
    let c = rng.random_range(0.6..1.4);
    let normal = Normal::new(0.0, rng.random_range(0.05..0.3)).unwrap();
    let pos: Vec<bool> = (0..n).map(|i| i % 2 == 0 || rng.random_bool(0.2)).collect();
    let rows = pos.iter().map(|&p| vec![if p { c } else { -c } + normal.sample(rng)]).collect();
    (rows, LabelVector::from_bools(&pos))
}

fn z_alignment(alpha: f64, rows: &[Vec<f64>], y: &LabelVector) -> f64 {
    let fm = FeatureMap::new(1, vec![Gene::parse("Z", alpha).unwrap()]).unwrap();
    alignment_of(gram_matrix(&fm, rows).unwrap().as_matrix(), y).unwrap()
}

#[test]
fn local_optimum_is_close_to_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..20 {
        let (rows, y) = two_clusters_1d(&mut rng);
        let grid_best = (0..2048)
            .map(|i| z_alignment(2.0 * std::f64::consts::PI * i as f64 / 2047.0, &rows, &y))
            .fold(f64::NEG_INFINITY, f64::max);
        let start = rng.random_range(0.1..2.0);
        let fm = FeatureMap::new(1, vec![Gene::parse("Z", start).unwrap()]).unwrap();
        let out = local_optimize_traced(&fm, &rows, &y, &LocalOptConfig::default()).unwrap();
        assert!(out.final_alignment >= out.initial_alignment);
        assert!(grid_best - out.final_alignment <= 0.02, "case {case}: {} vs grid {grid_best}", out.final_alignment);
    }
}

#[test]
fn finite_difference_gradient_agrees_with_half_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let normal = Normal::new(0.0, 1.0).unwrap();
    for _ in 0..20 {
        let rows: Vec<Vec<f64>> = (0..20).map(|_| vec![normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
        let y = LabelVector::from_bools(&(0..20).map(|i| rows[i][0] * rows[i][1] > 0.0 || i == 0).collect::<Vec<_>>());
        if y.negatives() == 0 {
            continue;
        }
        let fm = FeatureMap::new(
            2,
            vec![Gene::parse("ZI", 1.0).unwrap(), Gene::parse("ZZ", 1.0).unwrap(), Gene::parse("XY", 1.0).unwrap()],
        )
        .unwrap();
        let alphas: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..2.0)).collect();
        let h = 1e-4;
        let coarse = alignment_gradient(&fm, &alphas, &rows, &y, h).unwrap();
        let fine = alignment_gradient(&fm, &alphas, &rows, &y, h / 2.0).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            let scale = b.abs().max(1e-3);
            assert!((a - b).abs() / scale <= 1e-4, "{a} vs {b}");
        }
    }
}

#[test]
fn local_optimization_never_lowers_alignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let cfg = EvolutionConfig { population_size: 200, gene_chain_size: 3, qubit_size: 2, ..EvolutionConfig::default() };
    let pop = init_population(&cfg, 99).unwrap();
    let opts = LocalOptConfig { max_iterations: 5, ..LocalOptConfig::default() };
    for ind in &pop.individuals {
        let n = 12;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
        let y = LabelVector::from_bools(&(0..n).map(|i| i < 5).collect::<Vec<_>>());
        let out = local_optimize_traced(ind, &rows, &y, &opts).unwrap();
        assert!(out.final_alignment >= out.initial_alignment - 1e-12);
        let words: Vec<_> = out.individual.genes().iter().map(|g| g.word.clone()).collect();
        assert_eq!(words, ind.genes().iter().map(|g| g.word.clone()).collect::<Vec<_>>());
    }
}

#[test]
fn parallel_evaluation_matches_serial_rescoring() {
    let cfg = EvolutionConfig { population_size: 16, qubit_size: 2, ..EvolutionConfig::default() };
    let pop: Population = init_population(&cfg, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let rows: Vec<Vec<f64>> = (0..25).map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect();
    let y = LabelVector::from_bools(&(0..25).map(|i| i % 4 == 0).collect::<Vec<_>>());
    for sel in [Selection::MaxEigen, Selection::Alignment] {
        let par = evaluate_population(&pop, &rows, &y, sel, 3).unwrap();
        let serial: Vec<f64> = pop.individuals.iter().map(|fm| score_individual(fm, &rows, &y, sel, 3).unwrap().fitness).collect();
        assert_eq!(par, serial);
    }
}

fn separable(seed: u64) -> (Vec<Vec<f64>>, LabelVector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.25).unwrap();
    // centres 1.5 apart per axis, i.e. six standard deviations; one positive in ten
    let pos: Vec<bool> = (0..60).map(|i| i % 10 == 0).collect();
    let rows = pos
        .iter()
        .map(|&p| {
            let c = if p { 0.75 } else { -0.75 };
            vec![c + normal.sample(&mut rng), c + normal.sample(&mut rng)]
        })
        .collect();
    (rows, LabelVector::from_bools(&pos))
}

#[test]
fn separable_toy_reaches_high_alignment_and_reports_rescore() {
    let (rows, y): (Vec<Vec<f64>>, LabelVector) = separable(21);
    let rbf = Gram::from_fn(rows.len(), rows.len(), |i, j| {
        let d2: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        (-d2).exp()
    });
    assert!(rbf_alignment(&rbf, &y) > 0.8);
    let cfg = EvolutionConfig {
        population_size: 20,
        maximum_generations: 10,
        qubit_size: 2,
        gene_chain_size: 3,
        elite_size: 4,
        master_seed: 21,
        selection: Selection::Alignment,
        ..EvolutionConfig::default()
    };
    let (best, report) = run(&cfg, &rows, &y).unwrap();
    let best_alignment = report.generations.iter().map(|g| g.best_alignment).fold(report.summary.final_alignment, f64::max);
    assert!(best_alignment >= 0.8, "best alignment {best_alignment}");
    // every reported individual re-scores from its JSON form
    let seed = report.summary.fitness_seed;
    let back = FeatureMap::from_json(&best.to_json()).unwrap();
    let s = score_individual(&back, &rows, &y, cfg.selection, seed).unwrap();
    assert!((s.fitness - report.summary.final_fitness).abs() <= 1e-10);
    for g in &report.generations {
        for e in &g.elite {
            let back = FeatureMap::from_json(&serde_json::to_string(&e.feature_map).unwrap()).unwrap();
            let s = score_individual(&back, &rows, &y, cfg.selection, seed).unwrap();
            assert!((s.fitness - e.fitness).abs() <= 1e-10);
        }
    }
}

type Gram = nalgebra::DMatrix<f64>;

fn rbf_alignment(k: &Gram, y: &LabelVector) -> f64 {
    let v: Vec<f64> = (0..y.len()).map(|i| y.value(i)).collect();
    let n = v.len() as f64;
    let num: f64 = (0..v.len()).flat_map(|i| (0..v.len()).map(move |j| (i, j))).map(|(i, j)| k[(i, j)] * v[i] * v[j]).sum();
    num / (k.norm() * n)
}
