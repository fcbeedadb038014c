use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};
use sqs_core::datapipe::{
    apply_reduction, downsample, fit_reduction, load_csv, stratified_split, synth_generate, write_csv, Dataset,
    GeneratorSpec, ReductionModel,
};
use sqs_core::evolution::{self, EvolutionReport};
use sqs_core::rng::{self, tag};
use sqs_core::svm::{
    auc, decision_values, default_rbf_gamma, linear_kernel, rbf_kernel, select_c_by_validation, train_precomputed,
    SvmConfig,
};
use sqs_core::{FeatureMap, LabelVector};

use crate::config::{default_label_column, default_positive_label, Baseline, DataSource, Overrides, RunConfig};
use crate::report::{render_table, BenchmarkReport, ModelRecord, TableFormat};
use crate::{CliError, CliResult};

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(CliError::io(format!("writing {}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(sqs_core::SqsError::from)?;
    text.push('\n');
    write_text(path, &text)
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))
}

fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn load_dataset(path: &Path, label_column: &str, positive_label: &str) -> CliResult<Dataset> {
    let (d, report) = load_csv(path, label_column, positive_label)?;
    if report.rejected > 0 {
        eprintln!(
            "warning: {}: rejected {} of {} rows",
            path.display(),
            report.rejected,
            report.accepted + report.rejected
        );
    }
    Ok(d)
}

/// Dataset from an explicit path, falling back to the config's data source.
fn resolve_data(path: Option<&Path>, labels: &LabelArgs, cfg: &RunConfig) -> CliResult<Dataset> {
    if let Some(p) = path {
        return load_dataset(p, &labels.label_column, &labels.positive_label);
    }
    match &cfg.data {
        Some(DataSource::File { path, label_column, positive_label }) => load_dataset(path, label_column, positive_label),
        Some(DataSource::Generator { generator }) => Ok(synth_generate(generator, cfg.seed)?),
        None => Err(CliError::Usage("no dataset given: pass --data or set `data` in the config".into())),
    }
}

fn output_dir(flag: Option<&Path>, cfg: &RunConfig) -> CliResult<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError::Usage("no output directory: pass --out-dir or set `outputDir`".into()))
}

#[derive(Debug, Clone, clap::Args)]
pub struct LabelArgs {
    #[arg(long, default_value_t = default_label_column())]
    pub label_column: String,
    #[arg(long, default_value_t = default_positive_label())]
    pub positive_label: String,
}

impl Default for LabelArgs {
    fn default() -> Self {
        Self { label_column: default_label_column(), positive_label: default_positive_label() }
    }
}

// ---------------------------------------------------------------- gen-data

#[derive(Debug, Clone, clap::Args)]
pub struct GenDataArgs {
    /// JSON generator spec.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct GenProvenance<'a> {
    spec: &'a GeneratorSpec,
    seed: u64,
    rows: usize,
    positives: usize,
    config_digest: String,
}

pub fn gen_data(args: &GenDataArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Config(format!("cannot read spec {}: {e}", args.spec.display())))?;
    let spec: GeneratorSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.spec.display())))?;
    let d = synth_generate(&spec, args.seed)?;
    let canonical = serde_json::json!({ "spec": &spec, "seed": args.seed }).to_string();
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    write_csv(&args.out, &d)?;
    let prov = GenProvenance {
        spec: &spec,
        seed: args.seed,
        rows: d.len(),
        positives: d.labels.positives(),
        config_digest: hex::encode(Sha256::digest(canonical.as_bytes())),
    };
    write_json(&sqs_core::qkernel::sidecar_path(&args.out), &prov)
}

// ---------------------------------------------------------------- preprocess

#[derive(Debug, Clone, clap::Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Raw CSV dataset; defaults to the config's data source.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Serialize)]
struct PreprocessSummary<'a> {
    config_digest: String,
    seed: u64,
    rows: usize,
    train_size: usize,
    test_size: usize,
    train_positives: usize,
    test_positives: usize,
    selected_columns: &'a [String],
}

/// Stratified split followed by a reduction fitted on the training rows only.
pub fn split_and_reduce(d: &Dataset, cfg: &RunConfig, train_fraction: f64, seed: u64) -> CliResult<(Dataset, Dataset, ReductionModel)> {
    let (train, test) = stratified_split(d, train_fraction, rng::derive_seed(seed, &[tag::SPLIT]))?;
    let model = fit_reduction(&train, cfg.reduction.top_k, cfg.out_dim(), cfg.reduction.bins)?;
    Ok((apply_reduction(&model, &train)?, apply_reduction(&model, &test)?, model))
}

pub fn preprocess(args: &PreprocessArgs) -> CliResult<()> {
    let cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    let out = output_dir(args.out_dir.as_deref(), &cfg)?;
    let d = resolve_data(args.data.as_deref(), &args.labels, &cfg)?;
    let (train, test, model) = split_and_reduce(&d, &cfg, 1.0 - cfg.test_fraction, cfg.seed)?;
    ensure_dir(&out)?;
    write_csv(&out.join("train.csv"), &train)?;
    write_csv(&out.join("test.csv"), &test)?;
    write_json(&out.join("reduction.json"), &model)?;
    write_json(
        &out.join("preprocess.json"),
        &PreprocessSummary {
            config_digest: cfg.digest(),
            seed: cfg.seed,
            rows: d.len(),
            train_size: train.len(),
            test_size: test.len(),
            train_positives: train.labels.positives(),
            test_positives: test.labels.positives(),
            selected_columns: &model.selected_columns,
        },
    )?;
    println!("train {} rows, test {} rows, written to {}", train.len(), test.len(), out.display());
    Ok(())
}

// ---------------------------------------------------------------- search

#[derive(Debug, Clone, clap::Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training CSV; defaults to the config's data source.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// Reduction model to apply before the search.
    #[arg(long)]
    pub reduction: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    pub dry_run: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Serialize)]
struct SearchSummary<'a> {
    config_digest: String,
    config: &'a RunConfig,
    reduced_columns: &'a [String],
    #[serde(flatten)]
    summary: &'a evolution::RunSummary,
}

/// Runs the evolutionary search on already reduced training data.
pub fn run_search(cfg: &RunConfig, train: &Dataset) -> CliResult<(FeatureMap, EvolutionReport)> {
    if train.dim() != cfg.evolution.qubit_size {
        return Err(CliError::Usage(format!(
            "training data has {} columns but qubitSize is {}",
            train.dim(),
            cfg.evolution.qubit_size
        )));
    }
    Ok(evolution::run(&cfg.evolution, &train.rows, &train.labels)?)
}

pub fn search(args: &SearchArgs) -> CliResult<()> {
    let cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    if args.dry_run {
        let resolved = serde_json::json!({ "configDigest": cfg.digest(), "config": &cfg });
        println!("{}", serde_json::to_string_pretty(&resolved).map_err(sqs_core::SqsError::from)?);
        return Ok(());
    }
    let out = output_dir(args.out_dir.as_deref(), &cfg)?;
    let d = resolve_data(args.train.as_deref(), &args.labels, &cfg)?;
    ensure_dir(&out)?;
    let reduced = match &args.reduction {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(CliError::io(format!("reading {}", p.display())))?;
            let model: ReductionModel =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            apply_reduction(&model, &d)?
        }
        None if d.dim() == cfg.evolution.qubit_size => d,
        None => {
            let model = fit_reduction(&d, cfg.reduction.top_k, cfg.out_dim(), cfg.reduction.bins)?;
            write_json(&out.join("reduction.json"), &model)?;
            apply_reduction(&model, &d)?
        }
    };
    let (best, report) = run_search(&cfg, &reduced)?;
    write_text(&out.join("best_feature_map.json"), &(best.to_json() + "\n"))?;
    write_text(&out.join("evolution.jsonl"), &report.to_json_lines()?)?;
    write_json(
        &out.join("summary.json"),
        &SearchSummary {
            config_digest: cfg.digest(),
            config: &cfg,
            reduced_columns: &reduced.columns,
            summary: &report.summary,
        },
    )?;
    println!(
        "best fitness {:.6}, alignment {:.6} after {} generations ({:?})",
        report.summary.final_fitness, report.summary.final_alignment, report.summary.generations_run, report.summary.stop_reason
    );
    Ok(())
}

// ---------------------------------------------------------------- model fitting

/// Scores of one precomputed-kernel SVM on a test set.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub auc: f64,
    pub c: f64,
    pub support_count: usize,
    pub decision_values: Vec<f64>,
    pub fit_seconds: f64,
}

fn fit_precomputed(
    k_train: &DMatrix<f64>,
    k_test: &DMatrix<f64>,
    train_y: &LabelVector,
    test_y: &LabelVector,
    cfg: &RunConfig,
    seed: u64,
) -> CliResult<FitOutcome> {
    let started = Instant::now();
    let c = if cfg.c_grid.len() == 1 {
        cfg.c_grid[0]
    } else {
        let split_seed = rng::derive_seed(seed, &[tag::SPLIT, 1]);
        select_c_by_validation(k_train, train_y, &cfg.svm, &cfg.c_grid, cfg.validation_fit_fraction, split_seed)?
    };
    let model = train_precomputed(k_train, train_y, &SvmConfig { c, ..cfg.svm.clone() })?;
    for w in &model.warnings {
        eprintln!("warning: {w}");
    }
    let scores = decision_values(&model, k_test)?;
    Ok(FitOutcome {
        auc: auc(&scores, test_y)?,
        c,
        support_count: model.support_indices.len(),
        decision_values: scores,
        fit_seconds: started.elapsed().as_secs_f64(),
    })
}

/// SVM on the evolved quantum kernel.
pub fn fit_sqs(fm: &FeatureMap, train: &Dataset, test: &Dataset, cfg: &RunConfig, seed: u64) -> CliResult<FitOutcome> {
    for d in [train, test] {
        if d.dim() != fm.qubits() {
            return Err(CliError::Usage(format!(
                "feature map acts on {} qubits but the data has {} columns",
                fm.qubits(),
                d.dim()
            )));
        }
    }
    let mode = cfg.kernel.mode(seed);
    let k_train = mode.gram(fm, &train.rows)?.into_matrix();
    let k_test = mode.cross(fm, &test.rows, &train.rows)?;
    fit_precomputed(&k_train, &k_test, &train.labels, &test.labels, cfg, seed)
}

/// SVM on a classical kernel.
pub fn fit_baseline(b: Baseline, train: &Dataset, test: &Dataset, cfg: &RunConfig, seed: u64) -> CliResult<FitOutcome> {
    if train.dim() != test.dim() {
        return Err(CliError::Usage(format!("train has {} columns, test has {}", train.dim(), test.dim())));
    }
    let (k_train, k_test) = match b {
        Baseline::SvcLinear => (linear_kernel(&train.rows, &train.rows), linear_kernel(&test.rows, &train.rows)),
        Baseline::SvcRbf => {
            let gamma = default_rbf_gamma(&train.rows);
            (rbf_kernel(&train.rows, &train.rows, gamma), rbf_kernel(&test.rows, &train.rows, gamma))
        }
    };
    fit_precomputed(&k_train, &k_test, &train.labels, &test.labels, cfg, seed)
}

fn record(scenario: &str, train: &Dataset, test: &Dataset, model: &str, seed: u64, fit: &FitOutcome) -> ModelRecord {
    ModelRecord {
        scenario: scenario.into(),
        train_size: train.len(),
        test_size: test.len(),
        model: model.into(),
        auc: fit.auc,
        fit_seconds: fit.fit_seconds,
        seed,
        c: Some(fit.c),
        support_count: Some(fit.support_count),
        feature_map: None,
        decision_values: None,
    }
}

/// Rows from an imported score file. Either `model,auc` pairs, or one column of
/// per-sample scores per model aligned with the test rows.
pub fn import_scores(path: &Path, scenario: &str, train_size: usize, test: &Dataset, seed: u64) -> CliResult<Vec<ModelRecord>> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers: Vec<String> = reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(|h| h.trim().to_string()).collect();
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().map_err(|e| bad(e.to_string()))?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
    let make = |model: &str, auc: f64| ModelRecord {
        scenario: scenario.into(),
        train_size,
        test_size: test.len(),
        model: model.into(),
        auc,
        fit_seconds: 0.0,
        seed,
        c: None,
        support_count: None,
        feature_map: None,
        decision_values: None,
    };
    let lower: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let records = if lower == ["model", "auc"] {
        rows.iter()
            .map(|r| {
                let auc = parse(r.get(1).unwrap_or(""))?;
                if !(0.0..=1.0).contains(&auc) {
                    return Err(bad(format!("AUC {auc} outside [0, 1]")));
                }
                Ok(make(r.get(0).unwrap_or("").trim(), auc))
            })
            .collect::<CliResult<Vec<_>>>()?
    } else {
        if rows.len() != test.len() {
            return Err(bad(format!("{} score rows for {} test rows", rows.len(), test.len())));
        }
        headers
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let scores = rows.iter().map(|r| parse(r.get(j).unwrap_or(""))).collect::<CliResult<Vec<_>>>()?;
                Ok(make(name, auc(&scores, &test.labels)?))
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    if records.is_empty() {
        return Err(bad("no models found".into()));
    }
    Ok(records)
}

// ---------------------------------------------------------------- evaluate

#[derive(Debug, Clone, clap::Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub feature_map: PathBuf,
    /// Reduced training CSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Reduced test CSV.
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// Classical baselines to add; repeatable.
    #[arg(long, value_enum)]
    pub baseline: Vec<Baseline>,
    /// CSV of externally computed model scores.
    #[arg(long)]
    pub import_scores: Option<PathBuf>,
    /// Metrics JSON to write.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

pub fn read_feature_map(path: &Path) -> CliResult<FeatureMap> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    FeatureMap::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<BenchmarkReport> {
    let cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    let fm = read_feature_map(&args.feature_map)?;
    let train = load_dataset(&args.train, &args.labels.label_column, &args.labels.positive_label)?;
    let test = load_dataset(&args.test, &args.labels.label_column, &args.labels.positive_label)?;
    let seed = cfg.seed;
    let sqs = fit_sqs(&fm, &train, &test, &cfg, seed)?;
    let mut rec = record("evaluate", &train, &test, "SQS", seed, &sqs);
    rec.feature_map = Some(fm.clone());
    rec.decision_values = Some(sqs.decision_values.clone());
    let mut records = vec![rec];
    for &b in &args.baseline {
        records.push(record("evaluate", &train, &test, b.label(), seed, &fit_baseline(b, &train, &test, &cfg, seed)?));
    }
    if let Some(p) = &args.import_scores {
        records.extend(import_scores(p, "evaluate", train.len(), &test, seed)?);
    }
    let report = BenchmarkReport { kind: "evaluate".into(), config_digest: cfg.digest(), seed, records };
    report.validate()?;
    write_json(&args.out, &report)?;
    print!("{}", render_table(&report.records, TableFormat::Text));
    Ok(report)
}

// ---------------------------------------------------------------- benchmarks

fn scenario_records(
    name: &str,
    train: &Dataset,
    test: &Dataset,
    cfg: &RunConfig,
    seed: u64,
) -> CliResult<Vec<ModelRecord>> {
    let mut run_cfg = cfg.clone();
    run_cfg.evolution.master_seed = seed;
    let started = Instant::now();
    let (best, _) = run_search(&run_cfg, train)?;
    let search_seconds = started.elapsed().as_secs_f64();
    let sqs = fit_sqs(&best, train, test, cfg, seed)?;
    let mut rec = record(name, train, test, "SQS", seed, &sqs);
    rec.fit_seconds += search_seconds;
    rec.feature_map = Some(best);
    let mut out = vec![rec];
    for &b in &cfg.baselines {
        out.push(record(name, train, test, b.label(), seed, &fit_baseline(b, train, test, cfg, seed)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, clap::Args)]
pub struct ScalingArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// Comma-separated scenario sizes; overrides `scenarios`.
    #[arg(long, value_delimiter = ',')]
    pub scenarios: Option<Vec<usize>>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Seed of the scenario with `size` rows.
pub fn scenario_seed(seed: u64, size: usize) -> u64 {
    rng::derive_seed(seed, &[tag::SCENARIO, size as u64])
}

pub fn scaling_bench(args: &ScalingArgs) -> CliResult<BenchmarkReport> {
    let mut cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    if let Some(s) = &args.scenarios {
        cfg.scenarios = s.clone();
        cfg.validate()?;
    }
    let out = output_dir(args.out_dir.as_deref(), &cfg)?;
    let d = resolve_data(args.data.as_deref(), &args.labels, &cfg)?;
    let mut sizes = cfg.scenarios.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(CliError::Usage("no scenarios given".into()));
    }
    if let Some(&too_big) = sizes.iter().find(|&&s| s > d.len()) {
        return Err(CliError::Usage(format!("scenario size {too_big} exceeds the {} available rows", d.len())));
    }
    let mut records = Vec::new();
    for &size in &sizes {
        let seed = scenario_seed(cfg.seed, size);
        let sample = downsample(&d, size, seed)?;
        let (train, test, _) = split_and_reduce(&sample, &cfg, 1.0 - cfg.test_fraction, seed)?;
        let recs = scenario_records(&size.to_string(), &train, &test, &cfg, seed)?;
        for r in &recs {
            eprintln!("scenario {size}: {} AUC {:.4}", r.model, r.auc);
        }
        records.extend(recs);
    }
    let report = BenchmarkReport { kind: "scaling".into(), config_digest: cfg.digest(), seed: cfg.seed, records };
    report.validate()?;
    ensure_dir(&out)?;
    write_json(&out.join("scaling.json"), &report)?;
    write_text(&out.join("scaling.csv"), &report.to_csv())?;
    print!("{}", render_table(&report.records, TableFormat::Text));
    Ok(report)
}

#[derive(Debug, Clone, clap::Args)]
pub struct GeneralizationArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// `model,auc` CSV of externally computed results.
    #[arg(long)]
    pub import_scores: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
}

pub fn generalization_bench(args: &GeneralizationArgs) -> CliResult<BenchmarkReport> {
    let cfg = resolve_config(args.config.as_deref(), &args.overrides)?;
    let out = output_dir(args.out_dir.as_deref(), &cfg)?;
    let d = resolve_data(args.data.as_deref(), &args.labels, &cfg)?;
    let (train, test, _) = split_and_reduce(&d, &cfg, cfg.generalization_train_fraction, cfg.seed)?;
    let mut records = scenario_records("generalization", &train, &test, &cfg, cfg.seed)?;
    if let Some(p) = &args.import_scores {
        records.extend(import_scores(p, "generalization", train.len(), &test, cfg.seed)?);
    }
    let report = BenchmarkReport { kind: "generalization".into(), config_digest: cfg.digest(), seed: cfg.seed, records };
    report.validate()?;
    ensure_dir(&out)?;
    write_json(&out.join("generalization.json"), &report)?;
    write_text(&out.join("generalization.csv"), &report.to_csv())?;
    print!("{}", render_table(&report.records, TableFormat::Text));
    Ok(report)
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, clap::Args)]
pub struct ReportArgs {
    /// Benchmark or evaluation JSON files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: TableFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn report_cmd(args: &ReportArgs) -> CliResult<String> {
    let mut records = Vec::new();
    for p in &args.inputs {
        let r = BenchmarkReport::read(p)?;
        r.validate()?;
        records.extend(r.records);
    }
    let table = render_table(&records, args.format);
    match &args.out {
        Some(p) => write_text(p, &table)?,
        None => print!("{table}"),
    }
    Ok(table)
}
