use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;

use super::Dataset;

/// Equal-frequency bin index per value. Bins depend only on ranks, and tied
/// values share the bin of their lowest rank.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        let bin = (start * bins / n).min(bins - 1);
        for &i in &order[start..=end] {
            out[i] = bin;
        }
        start = end + 1;
    }
    out
}

/// Plug-in mutual information (nats) between a binned feature and the labels.
pub fn mutual_information(values: &[f64], labels: &LabelVector, bins: usize) -> f64 {
    let n = values.len();
    let binned = equal_frequency_bins(values, bins);
    let mut joint = vec![[0usize; 2]; bins];
    for (i, &b) in binned.iter().enumerate() {
        joint[b][usize::from(labels.is_positive(i))] += 1;
    }
    let nf = n as f64;
    let class = [labels.negatives() as f64 / nf, labels.positives() as f64 / nf];
    let mut mi = 0.0;
    for row in &joint {
        let pb = (row[0] + row[1]) as f64 / nf;
        for c in 0..2 {
            if row[c] > 0 {
                let p = row[c] as f64 / nf;
                mi += p * (p / (pb * class[c])).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Columns sorted by descending mutual information with the label; ties keep column order.
pub fn mutual_info_rank(d: &Dataset, bins: usize) -> Result<Vec<(usize, f64)>> {
    if bins < 2 {
        return Err(SqsError::Usage(format!("need at least 2 bins, got {bins}")));
    }
    let mut scores: Vec<(usize, f64)> = (0..d.dim())
        .map(|j| (j, mutual_information(&d.column(j), &d.labels, bins)))
        .collect();
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scores)
}
