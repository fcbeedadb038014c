use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sqs_core::FeatureMap;

use crate::{CliError, CliResult};

/// One model scored on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub scenario: String,
    pub train_size: usize,
    pub test_size: usize,
    pub model: String,
    pub auc: f64,
    pub fit_seconds: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_map: Option<FeatureMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub kind: String,
    pub config_digest: String,
    pub seed: u64,
    pub records: Vec<ModelRecord>,
}

impl BenchmarkReport {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not a benchmark report: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        match self.records.iter().find(|r| !(0.0..=1.0).contains(&r.auc)) {
            Some(r) => Err(CliError::Usage(format!("{} on {} has AUC {} outside [0, 1]", r.model, r.scenario, r.auc))),
            None => Ok(()),
        }
    }

    /// Plot-ready rows: scenario, sizes, model, AUC.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,train_size,test_size,model,auc,seed\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.scenario, r.train_size, r.test_size, r.model, r.auc, r.seed);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Markdown,
    Text,
    Csv,
}

/// Renders records grouped by scenario, marking the best AUC of each group.
pub fn render_table(records: &[ModelRecord], format: TableFormat) -> String {
    let mut scenarios: Vec<&str> = Vec::new();
    for r in records {
        if !scenarios.contains(&r.scenario.as_str()) {
            scenarios.push(&r.scenario);
        }
    }
    let mut out = String::new();
    match format {
        TableFormat::Markdown => out.push_str("| Scenario | Train | Test | Model | AUC |\n|---|---:|---:|---|---:|\n"),
        TableFormat::Text => {
            let _ = writeln!(out, "{:<16} {:>7} {:>7} {:<14} {:>8}", "scenario", "train", "test", "model", "AUC");
        }
        TableFormat::Csv => out.push_str("scenario,train_size,test_size,model,auc,best\n"),
    }
    for s in scenarios {
        let group: Vec<&ModelRecord> = records.iter().filter(|r| r.scenario == s).collect();
        let best = group.iter().map(|r| r.auc).fold(f64::NEG_INFINITY, f64::max);
        for r in group {
            let flagged = r.auc == best;
            let _ = match format {
                TableFormat::Markdown => {
                    let auc = if flagged { format!("**{:.3}**", r.auc) } else { format!("{:.3}", r.auc) };
                    writeln!(out, "| {} | {} | {} | {} | {} |", r.scenario, r.train_size, r.test_size, r.model, auc)
                }
                TableFormat::Text => writeln!(
                    out,
                    "{:<16} {:>7} {:>7} {:<14} {:>8.3}{}",
                    r.scenario,
                    r.train_size,
                    r.test_size,
                    r.model,
                    r.auc,
                    if flagged { " *" } else { "" }
                ),
                TableFormat::Csv => writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.scenario, r.train_size, r.test_size, r.model, r.auc, flagged
                ),
            };
        }
    }
    out
}
