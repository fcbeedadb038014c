//! Scores for candidate kernels.
//!
//! * kernel-target alignment `⟨K, yyᵀ⟩_F / (‖K‖_F·‖yyᵀ‖_F)` with `y ∈ {−1, +1}`;
//! * normalized dominant eigenvalue `λ_max(K) / trace(K)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};
use crate::qkernel::GramMatrix;
use crate::rng;

/// Binary labels stored as signs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct LabelVector {
    signs: Vec<i8>,
}

impl TryFrom<Vec<i8>> for LabelVector {
    type Error = SqsError;

    fn try_from(signs: Vec<i8>) -> Result<Self> {
        LabelVector::new(signs)
    }
}

impl From<LabelVector> for Vec<i8> {
    fn from(l: LabelVector) -> Vec<i8> {
        l.signs
    }
}

impl LabelVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(SqsError::Usage(format!("labels must be ±1, found {bad}")));
        }
        Ok(Self { signs })
    }

    pub fn from_bools(positive: &[bool]) -> Self {
        Self { signs: positive.iter().map(|&p| if p { 1 } else { -1 }).collect() }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn value(&self, i: usize) -> f64 {
        f64::from(self.signs[i])
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.signs[i] > 0
    }

    pub fn positives(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    pub fn negated(&self) -> Self {
        Self { signs: self.signs.iter().map(|s| -s).collect() }
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self { signs: idx.iter().map(|&i| self.signs[i]).collect() }
    }

    pub fn require_both_classes(&self) -> Result<()> {
        if self.positives() == 0 || self.negatives() == 0 {
            return Err(SqsError::Usage(format!(
                "both classes required, got {} positive / {} negative",
                self.positives(),
                self.negatives()
            )));
        }
        Ok(())
    }
}

/// Alignment of `k` with the ideal kernel `yyᵀ`; lies in `[−1, 1]`.
pub fn target_alignment(k: &GramMatrix, y: &LabelVector) -> Result<f64> {
    alignment_of(k.as_matrix(), y)
}

/// Same as [`target_alignment`] on an arbitrary square matrix.
pub fn alignment_of(k: &DMatrix<f64>, y: &LabelVector) -> Result<f64> {
    let n = k.nrows();
    if n != y.len() || k.ncols() != n {
        return Err(SqsError::Dimension { expected: n, got: y.len() });
    }
    y.require_both_classes()?;
    let mut inner = 0.0;
    let mut frob = 0.0;
    for j in 0..n {
        let yj = y.value(j);
        for i in 0..n {
            let v = k[(i, j)];
            inner += v * y.value(i) * yj;
            frob += v * v;
        }
    }
    if !frob.is_finite() || !inner.is_finite() {
        return Err(SqsError::Numeric("non-finite kernel entries in alignment".into()));
    }
    if frob == 0.0 {
        return Err(SqsError::Numeric("alignment of the zero matrix is undefined".into()));
    }
    // ‖yyᵀ‖_F = N for ±1 labels
    Ok(inner / (frob.sqrt() * n as f64))
}

pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;

/// Dominant eigenvalue of a symmetric PSD matrix by power iteration.
///
/// The start vector is drawn from a stream seeded by `seed`. Iteration stops
/// once two successive Rayleigh quotients differ by less than [`POWER_TOL`],
/// and the estimate is then polished by a Rayleigh–Ritz step on the last Krylov vectors.
pub fn symmetric_max_eigenvalue(k: &DMatrix<f64>, seed: u64) -> Result<f64> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(SqsError::Dimension { expected: n, got: k.ncols() });
    }
    for i in 0..n {
        for j in 0..i {
            if (k[(i, j)] - k[(j, i)]).abs() > 1e-8 {
                return Err(SqsError::Usage(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    if k.iter().any(|v| !v.is_finite()) {
        return Err(SqsError::Numeric("non-finite matrix entries".into()));
    }
    let mut rng = rng::stream(seed, &[rng::tag::POWER_ITERATION]);
    let mut v = DVector::from_fn(n, |_, _| rng.random_range(0.5..1.5));
    v /= v.norm();
    let mut w = k * &v;
    let mut rayleigh = v.dot(&w);
    for _ in 0..POWER_MAX_ITER {
        let norm = w.norm();
        if norm == 0.0 {
            // v lies in the null space; for PSD inputs the spectrum is then zero along v
            return Ok(rayleigh);
        }
        v = w / norm;
        w = k * &v;
        let next = v.dot(&w);
        if (next - rayleigh).abs() < POWER_TOL {
            return Ok(ritz_refine(k, &v, &w).max(next));
        }
        rayleigh = next;
    }
    Err(SqsError::Convergence { iterations: POWER_MAX_ITER, last_rayleigh: rayleigh })
}

/// Largest Ritz value of `k` on span{v, Kv, K²v}; `w` is `Kv`.
fn ritz_refine(k: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(3);
    for cand in [v.clone(), w.clone(), k * w] {
        let scale = cand.norm();
        let mut q = cand;
        for _ in 0..2 {
            for b in &basis {
                q -= b * b.dot(&q);
            }
        }
        let norm = q.norm();
        if norm > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            basis.push(q / norm);
        }
    }
    let images: Vec<DVector<f64>> = basis.iter().map(|b| k * b).collect();
    let m = basis.len();
    let t = DMatrix::from_fn(m, m, |i, j| 0.5 * (basis[i].dot(&images[j]) + basis[j].dot(&images[i])));
    t.symmetric_eigen().eigenvalues.max()
}

/// `λ_max(K) / trace(K)`, in `[1/N, 1]` for a unit-diagonal PSD kernel.
pub fn max_eigen_fitness(k: &GramMatrix, seed: u64) -> Result<f64> {
    let m = k.as_matrix();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SqsError::Numeric("non-finite Gram entries".into()));
    }
    let trace = m.trace();
    Ok(symmetric_max_eigenvalue(m, seed)? / trace)
}
