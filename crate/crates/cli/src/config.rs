use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sqs_core::datapipe::GeneratorSpec;
use sqs_core::evolution::EvolutionConfig;
use sqs_core::qkernel::KernelMode;
use sqs_core::rng;
use sqs_core::svm::SvmConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ReductionParams {
    pub top_k: usize,
    /// Defaults to the evolution qubit count.
    pub out_dim: Option<usize>,
    pub bins: usize,
}

impl Default for ReductionParams {
    fn default() -> Self {
        Self { top_k: 10, out_dim: None, bins: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DataSource {
    File {
        path: PathBuf,
        #[serde(rename = "labelColumn", default = "default_label_column")]
        label_column: String,
        #[serde(rename = "positiveLabel", default = "default_positive_label")]
        positive_label: String,
    },
    Generator {
        generator: GeneratorSpec,
    },
}

pub fn default_label_column() -> String {
    "label".into()
}

pub fn default_positive_label() -> String {
    "1".into()
}

/// `exact` or `shots:<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum KernelSpec {
    #[default]
    Exact,
    Shots(u64),
}

impl TryFrom<String> for KernelSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<KernelSpec> for String {
    fn from(k: KernelSpec) -> String {
        match k {
            KernelSpec::Exact => "exact".into(),
            KernelSpec::Shots(n) => format!("shots:{n}"),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "exact" {
            return Ok(KernelSpec::Exact);
        }
        match s.strip_prefix("shots:").map(str::parse::<u64>) {
            Some(Ok(n)) if n > 0 => Ok(KernelSpec::Shots(n)),
            _ => Err(format!("kernel mode must be `exact` or `shots:<n>` with n > 0, got `{s}`")),
        }
    }
}

impl KernelSpec {
    pub fn mode(self, seed: u64) -> KernelMode {
        match self {
            KernelSpec::Exact => KernelMode::Exact,
            KernelSpec::Shots(shots) => KernelMode::Shots { shots, seed: rng::derive_seed(seed, &[rng::tag::SHOTS]) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RunConfig {
    pub evolution: EvolutionConfig,
    pub svm: SvmConfig,
    pub reduction: ReductionParams,
    pub data: Option<DataSource>,
    /// Experiment seed for splits, subsampling and C selection.
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub kernel: KernelSpec,
    pub c_grid: Vec<f64>,
    /// Share of the training rows used to fit when choosing `C`.
    pub validation_fit_fraction: f64,
    pub test_fraction: f64,
    pub generalization_train_fraction: f64,
    pub scenarios: Vec<usize>,
    pub baselines: Vec<Baseline>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            evolution: EvolutionConfig::default(),
            svm: SvmConfig::default(),
            reduction: ReductionParams::default(),
            data: None,
            seed: 0,
            output_dir: None,
            kernel: KernelSpec::Exact,
            c_grid: vec![0.1, 1.0, 10.0, 100.0],
            validation_fit_fraction: 0.75,
            test_fraction: 0.2,
            generalization_train_fraction: 0.1,
            scenarios: vec![500, 1000, 2000, 3000],
            baselines: vec![Baseline::SvcRbf],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    SvcRbf,
    SvcLinear,
}

impl Baseline {
    pub fn label(self) -> &'static str {
        match self {
            Baseline::SvcRbf => "SVC",
            Baseline::SvcLinear => "SVC-linear",
        }
    }
}

fn fraction(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must lie strictly between 0 and 1, got {v}")))
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::from_file)
    }

    pub fn out_dim(&self) -> usize {
        self.reduction.out_dim.unwrap_or(self.evolution.qubit_size)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.evolution.validate()?;
        self.svm.validate()?;
        if self.out_dim() != self.evolution.qubit_size {
            return Err(CliError::Config(format!(
                "reduction.outDim ({}) must equal evolution.qubitSize ({})",
                self.out_dim(),
                self.evolution.qubit_size
            )));
        }
        if self.reduction.top_k == 0 || self.reduction.bins < 2 {
            return Err(CliError::Config("reduction needs topK ≥ 1 and bins ≥ 2".into()));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(CliError::Config("cGrid must be a non-empty list of positive values".into()));
        }
        fraction("validationFitFraction", self.validation_fit_fraction)?;
        fraction("testFraction", self.test_fraction)?;
        fraction("generalizationTrainFraction", self.generalization_train_fraction)?;
        if self.scenarios.contains(&0) {
            return Err(CliError::Config("scenario sizes must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Experiment seed; also sets evolution.masterSeed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub elite_size: Option<usize>,
    #[arg(long, value_parser = ["max-eigen", "alignment"])]
    pub selection: Option<String>,
    /// `exact` or `shots:<n>`.
    #[arg(long)]
    pub kernel: Option<KernelSpec>,
    #[arg(long)]
    pub top_k: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.evolution.master_seed = s;
        }
        if let Some(v) = self.population_size {
            cfg.evolution.population_size = v;
        }
        if let Some(v) = self.generations {
            cfg.evolution.maximum_generations = v;
        }
        if let Some(v) = self.qubits {
            cfg.evolution.qubit_size = v;
        }
        if let Some(v) = self.elite_size {
            cfg.evolution.elite_size = v;
        }
        if let Some(v) = &self.selection {
            cfg.evolution.selection = serde_json::from_value(serde_json::Value::String(v.clone()))
                .expect("clap restricts selection values");
        }
        if let Some(v) = self.kernel {
            cfg.kernel = v;
        }
        if let Some(v) = self.top_k {
            cfg.reduction.top_k = v;
        }
    }
}
