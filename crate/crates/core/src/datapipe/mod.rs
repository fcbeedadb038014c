//! Tabular data handling: ingestion, feature ranking, dimensionality
//! reduction, stratified splitting and synthetic generators.

mod io;
mod mutual_info;
mod reduction;
mod split;
mod synth;

pub use io::{load_csv, write_csv, LoadReport};
pub use mutual_info::{equal_frequency_bins, mutual_info_rank, mutual_information};
pub use reduction::{apply_reduction, fit_reduction, ReductionModel};
pub use split::{downsample, stratified_indices, stratified_split};
pub use synth::{synth_generate, GeneratorSpec};

use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;

/// Feature matrix with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: LabelVector,
    /// Stable row identifiers, carried through splits and subsamples.
    pub ids: Vec<String>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>, labels: LabelVector, provenance: impl Into<String>) -> Result<Self> {
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        let d = Self { columns, rows, labels, ids, provenance: provenance.into() };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() < 2 {
            return Err(SqsError::Usage(format!("dataset needs at least 2 rows, has {}", self.rows.len())));
        }
        if self.columns.is_empty() {
            return Err(SqsError::Usage("dataset needs at least one feature column".into()));
        }
        if self.labels.len() != self.rows.len() || self.ids.len() != self.rows.len() {
            return Err(SqsError::Dimension { expected: self.rows.len(), got: self.labels.len() });
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.columns.len() {
                return Err(SqsError::Dimension { expected: self.columns.len(), got: r.len() });
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(SqsError::Numeric(format!("row {i} has non-finite values")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Rows at `idx`, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: self.labels.subset(idx),
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}
