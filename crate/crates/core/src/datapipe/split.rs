use rand::seq::SliceRandom;

use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;
use crate::rng;

use super::Dataset;

fn class_members(y: &LabelVector, positive: bool) -> Vec<usize> {
    (0..y.len()).filter(|&i| y.is_positive(i) == positive).collect()
}

fn shuffled(mut idx: Vec<usize>, seed: u64, purpose: u64, class: u64) -> Vec<usize> {
    let mut r = rng::stream(seed, &[purpose, class]);
    idx.shuffle(&mut r);
    idx
}

/// Per-class proportional split of row indices. Both parts are returned in ascending order.
pub fn stratified_indices(y: &LabelVector, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SqsError::Usage(format!("train fraction must be in (0, 1), got {train_fraction}")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, positive) in [(0u64, false), (1u64, true)] {
        let members = class_members(y, positive);
        if members.len() < 2 {
            return Err(SqsError::Usage(format!(
                "class {} has {} member(s); stratified split needs at least 2",
                if positive { "+1" } else { "-1" },
                members.len()
            )));
        }
        let n = members.len();
        let take = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
        let order = shuffled(members, seed, rng::tag::SPLIT, class);
        train.extend_from_slice(&order[..take]);
        test.extend_from_slice(&order[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn stratified_split(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = stratified_indices(&d.labels, train_fraction, seed)?;
    Ok((d.subset(&train), d.subset(&test)))
}

/// Stratified subsample of `n` rows. Rows keep their original order, and for a
/// fixed seed a smaller sample is contained in a larger one.
pub fn downsample(d: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(SqsError::Usage(format!("downsample size must be at least 2, got {n}")));
    }
    if n > d.len() {
        return Err(SqsError::Usage(format!("cannot draw {n} rows from {}", d.len())));
    }
    let pos = class_members(&d.labels, true);
    let neg = class_members(&d.labels, false);
    let mut n_pos = (n as f64 * pos.len() as f64 / d.len() as f64).round() as usize;
    if !pos.is_empty() && !neg.is_empty() {
        n_pos = n_pos.clamp(1, n - 1);
    }
    n_pos = n_pos.min(pos.len()).max(n.saturating_sub(neg.len()));
    let n_neg = n - n_pos;
    let mut idx: Vec<usize> = shuffled(pos, seed, rng::tag::DOWNSAMPLE, 1)[..n_pos].to_vec();
    idx.extend_from_slice(&shuffled(neg, seed, rng::tag::DOWNSAMPLE, 0)[..n_neg]);
    idx.sort_unstable();
    Ok(d.subset(&idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(n: usize, positives: usize) -> Dataset {
        let rows = (0..n).map(|i| vec![i as f64]).collect();
        let y = LabelVector::from_bools(&(0..n).map(|i| i < positives).collect::<Vec<_>>());
        Dataset::new(vec!["x".into()], rows, y, "t").unwrap()
    }

    #[test]
    fn proportional_split() {
        let d = dataset(100, 10);
        let (train, test) = stratified_split(&d, 0.8, 4).unwrap();
        assert_eq!(train.labels.positives(), 8);
        assert_eq!(train.labels.negatives(), 72);
        assert_eq!(test.len(), 20);
        let overlap = train.ids.iter().filter(|id| test.ids.contains(id)).count();
        assert_eq!(overlap, 0);
        assert_eq!(stratified_split(&d, 0.8, 4).unwrap().0, train);
        assert_ne!(stratified_split(&d, 0.8, 5).unwrap().0.ids, train.ids);
    }

    #[test]
    fn ten_percent_train_on_paper_shape() {
        let d = dataset(4763, 476);
        let (train, _) = stratified_split(&d, 0.1, 1).unwrap();
        assert!((train.len() as i64 - 476).abs() <= 1);
        assert!((train.labels.positives() as i64 - 48).abs() <= 1);
    }

    #[test]
    fn split_errors() {
        let d = dataset(10, 1);
        assert!(matches!(stratified_split(&d, 0.5, 0), Err(SqsError::Usage(_))));
        let d = dataset(10, 5);
        assert!(stratified_split(&d, 1.0, 0).is_err());
        assert!(stratified_split(&d, 0.0, 0).is_err());
    }

    #[test]
    fn downsample_contracts() {
        let d = dataset(1000, 100);
        assert_eq!(downsample(&d, 1000, 3).unwrap(), d);
        let s = downsample(&d, 500, 3).unwrap();
        assert!((s.labels.positives() as i64 - 50).abs() <= 1);
        assert_eq!(s, downsample(&d, 500, 3).unwrap());
        let small = downsample(&d, 200, 3).unwrap();
        assert!(small.ids.iter().all(|id| s.ids.contains(id)));
        assert!(downsample(&d, 1, 3).is_err());
        assert!(downsample(&d, 1001, 3).is_err());
    }
}
