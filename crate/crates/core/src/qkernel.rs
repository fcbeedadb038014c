//! Fidelity quantum kernels.
//!
//! `k(x, x′) = |⟨φ(x)|φ(x′)⟩|²`, computed exactly from simulated statevectors
//! or estimated by sampling the all-zero outcome of the inversion circuit
//! `H·U(x′)†·U(x)·H|0…0⟩`.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};
use crate::rng;
use crate::sim::{apply_inverse_encoding, encode, FeatureMap, StateVector};

/// Symmetric, unit-diagonal matrix of pairwise kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    /// Wraps a square matrix after checking symmetry, unit diagonal and entry bounds.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let g = Self { entries };
        g.check_structure(1e-10)?;
        Ok(g)
    }

    pub(crate) fn from_matrix_unchecked(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn check_structure(&self, tol: f64) -> Result<()> {
        let n = self.entries.nrows();
        if n != self.entries.ncols() {
            return Err(SqsError::Dimension { expected: n, got: self.entries.ncols() });
        }
        for i in 0..n {
            if (self.entries[(i, i)] - 1.0).abs() > tol {
                return Err(SqsError::Numeric(format!("diagonal entry {i} is {}", self.entries[(i, i)])));
            }
            for j in 0..n {
                let v = self.entries[(i, j)];
                if !v.is_finite() || v < -tol || v > 1.0 + tol {
                    return Err(SqsError::Numeric(format!("entry ({i},{j}) = {v} outside [0, 1]")));
                }
                if (v - self.entries[(j, i)]).abs() > tol {
                    return Err(SqsError::Numeric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.clone().symmetric_eigen().eigenvalues.min()
    }
}

pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

pub fn kernel_entry(fm: &FeatureMap, x: &[f64], x2: &[f64]) -> Result<f64> {
    fidelity(&encode(fm, x)?, &encode(fm, x2)?)
}

fn encode_all(fm: &FeatureMap, rows: &[Vec<f64>]) -> Result<Vec<StateVector>> {
    rows.par_iter().map(|x| encode(fm, x)).collect()
}

/// Exact Gram matrix. Each row is encoded once and only the upper triangle is evaluated.
pub fn gram_matrix(fm: &FeatureMap, rows: &[Vec<f64>]) -> Result<GramMatrix> {
    if rows.is_empty() {
        return Err(SqsError::Usage("cannot build a Gram matrix of an empty dataset".into()));
    }
    let states = encode_all(fm, rows)?;
    let n = states.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| fidelity(&states[i], &states[j]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(GramMatrix::from_matrix_unchecked(mirror(n, &upper)))
}

fn mirror(n: usize, upper: &[Vec<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `|eval| × |train|` matrix of kernel values.
pub fn cross_gram(fm: &FeatureMap, eval: &[Vec<f64>], train: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let eval_states = encode_all(fm, eval)?;
    let train_states = encode_all(fm, train)?;
    let rows: Vec<Vec<f64>> = eval_states
        .par_iter()
        .map(|e| train_states.iter().map(|t| fidelity(e, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(eval.len(), train.len(), |i, j| rows[i][j]))
}

/// Probability of the all-zero outcome of the inversion circuit, before sampling.
pub fn inversion_test_probability(fm: &FeatureMap, x: &[f64], x2: &[f64]) -> Result<f64> {
    let mut state = encode(fm, x)?;
    apply_inverse_encoding(&mut state, fm, x2)?;
    Ok(state.amplitudes()[0].norm_sqr())
}

/// Shot-sampled kernel estimate: `Binomial(shots, p₀) / shots`, deterministic in `seed`.
pub fn inversion_test_estimate(fm: &FeatureMap, x: &[f64], x2: &[f64], shots: u64, seed: u64) -> Result<f64> {
    if shots == 0 {
        return Err(SqsError::Usage("inversion test needs at least one shot".into()));
    }
    let p0 = inversion_test_probability(fm, x, x2)?.clamp(0.0, 1.0);
    let dist = Binomial::new(shots, p0).map_err(|e| SqsError::Numeric(format!("binomial({shots}, {p0}): {e}")))?;
    let mut rng = rng::stream(seed, &[rng::tag::SHOTS]);
    Ok(dist.sample(&mut rng) as f64 / shots as f64)
}

/// How kernel entries are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum KernelMode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

impl KernelMode {
    fn entry_seed(seed: u64, block: u64, i: usize, j: usize) -> u64 {
        rng::derive_seed(seed, &[block, i as u64, j as u64])
    }

    pub fn gram(&self, fm: &FeatureMap, rows: &[Vec<f64>]) -> Result<GramMatrix> {
        match *self {
            KernelMode::Exact => gram_matrix(fm, rows),
            KernelMode::Shots { shots, seed } => {
                if rows.is_empty() {
                    return Err(SqsError::Usage("cannot build a Gram matrix of an empty dataset".into()));
                }
                let n = rows.len();
                let upper: Vec<Vec<f64>> = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        ((i + 1)..n)
                            .map(|j| inversion_test_estimate(fm, &rows[i], &rows[j], shots, Self::entry_seed(seed, 0, i, j)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(GramMatrix::from_matrix_unchecked(mirror(n, &upper)))
            }
        }
    }

    pub fn cross(&self, fm: &FeatureMap, eval: &[Vec<f64>], train: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        match *self {
            KernelMode::Exact => cross_gram(fm, eval, train),
            KernelMode::Shots { shots, seed } => {
                let rows: Vec<Vec<f64>> = (0..eval.len())
                    .into_par_iter()
                    .map(|i| {
                        (0..train.len())
                            .map(|j| inversion_test_estimate(fm, &eval[i], &train[j], shots, Self::entry_seed(seed, 1, i, j)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(DMatrix::from_fn(eval.len(), train.len(), |i, j| rows[i][j]))
            }
        }
    }
}

/// JSON sidecar describing an exported Gram matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramSidecar {
    pub feature_map: FeatureMap,
    pub n: usize,
    pub exact: bool,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

/// Writes `gram` as CSV (header row of sample ids) plus a `<path>.json` sidecar.
pub fn export_gram(path: &Path, gram: &GramMatrix, ids: &[String], fm: &FeatureMap, mode: KernelMode) -> Result<()> {
    if ids.len() != gram.n() {
        return Err(SqsError::Dimension { expected: gram.n(), got: ids.len() });
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| SqsError::Ingestion(e.to_string()))?;
    w.write_record(ids).map_err(|e| SqsError::Ingestion(e.to_string()))?;
    for i in 0..gram.n() {
        w.write_record((0..gram.n()).map(|j| gram.get(i, j).to_string()))
            .map_err(|e| SqsError::Ingestion(e.to_string()))?;
    }
    w.flush()?;
    let (exact, shots, seed) = match mode {
        KernelMode::Exact => (true, None, None),
        KernelMode::Shots { shots, seed } => (false, Some(shots), Some(seed)),
    };
    let sidecar = GramSidecar { feature_map: fm.clone(), n: gram.n(), exact, shots, seed };
    let mut f = std::fs::File::create(sidecar_path(path))?;
    f.write_all(serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
