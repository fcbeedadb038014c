use std::path::Path;

use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;

use super::Dataset;

/// Outcome of [`load_csv`] besides the dataset itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    pub accepted: usize,
    pub rejected: usize,
    /// 1-based data-row numbers (header excluded) of rejected rows.
    pub rejected_rows: Vec<usize>,
}

/// Reads a headed CSV. Every column other than `label_column` is a numeric
/// feature; rows with unparseable, missing or non-finite cells are dropped
/// and counted. Labels equal to `positive_label` map to +1, all others to −1.
pub fn load_csv(path: &Path, label_column: &str, positive_label: &str) -> Result<(Dataset, LoadReport)> {
    let ctx = |e: csv::Error| SqsError::Ingestion(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(ctx)?;
    let headers = reader.headers().map_err(ctx)?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(SqsError::Ingestion(format!("{}: empty file or missing header row", path.display())));
    }
    let label_idx = headers
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| SqsError::Ingestion(format!("{}: label column {label_column:?} not found", path.display())))?;
    let feature_idx: Vec<usize> = (0..headers.len()).filter(|&i| i != label_idx).collect();
    if feature_idx.is_empty() {
        return Err(SqsError::Ingestion(format!("{}: no feature columns besides {label_column:?}", path.display())));
    }
    let columns = feature_idx.iter().map(|&i| headers[i].trim().to_string()).collect();

    let mut rows = Vec::new();
    let mut signs = Vec::new();
    let mut ids = Vec::new();
    let mut rejected_rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let row_no = n + 1;
        let Ok(record) = record else {
            rejected_rows.push(row_no);
            continue;
        };
        if record.len() != headers.len() {
            rejected_rows.push(row_no);
            continue;
        }
        let label = record[label_idx].trim();
        let parsed: Option<Vec<f64>> = feature_idx
            .iter()
            .map(|&i| record[i].trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match parsed {
            Some(values) if !label.is_empty() => {
                rows.push(values);
                signs.push(if label == positive_label { 1 } else { -1 });
                ids.push(n.to_string());
            }
            _ => rejected_rows.push(row_no),
        }
    }
    if rows.len() < 2 {
        return Err(SqsError::Ingestion(format!(
            "{}: only {} usable rows ({} rejected)",
            path.display(),
            rows.len(),
            rejected_rows.len()
        )));
    }
    let report = LoadReport { accepted: rows.len(), rejected: rejected_rows.len(), rejected_rows };
    let dataset = Dataset {
        columns,
        rows,
        labels: LabelVector::new(signs)?,
        ids,
        provenance: path.display().to_string(),
    };
    Ok((dataset, report))
}

/// Writes features plus a `label` column holding `1` / `-1`.
pub fn write_csv(path: &Path, d: &Dataset) -> Result<()> {
    let ctx = |e: csv::Error| SqsError::Ingestion(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(ctx)?;
    let mut header: Vec<&str> = d.columns.iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header).map_err(ctx)?;
    for (i, row) in d.rows.iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(d.labels.signs()[i].to_string());
        w.write_record(&rec).map_err(ctx)?;
    }
    w.flush()?;
    Ok(())
}
