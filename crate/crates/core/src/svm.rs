//! Soft-margin SVM on precomputed kernels, trained by SMO.
//!
//! The dual `max Σαᵢ − ½ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ` subject to `0 ≤ αᵢ ≤ Cᵢ`, `Σαᵢyᵢ = 0`
//! is solved by pairwise updates. Each step picks the maximal violating index
//! `i` and the partner `j` with the largest second-order gain, as in Fan,
//! Chen & Lin (2005). Minority-class weighting enters through `Cᵢ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::datapipe::stratified_indices;
use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SvmConfig {
    pub c: f64,
    /// Multiplier on `C` for positive samples; `None` means `#negative / #positive`.
    pub class_weight_positive: Option<f64>,
    pub kkt_tolerance: f64,
    /// Iteration budget, in sweeps of `N` pair updates.
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { c: 1.0, class_weight_positive: None, kkt_tolerance: 1e-3, max_passes: 1000 }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SqsError::Config(format!("C must be positive, got {}", self.c)));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(SqsError::Config(format!("KKT tolerance must be positive, got {}", self.kkt_tolerance)));
        }
        if let Some(w) = self.class_weight_positive {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SqsError::Config(format!("class weight must be positive, got {w}")));
            }
        }
        if self.max_passes == 0 {
            return Err(SqsError::Config("max_passes must be positive".into()));
        }
        Ok(())
    }

    /// Per-sample upper bounds `Cᵢ`.
    pub fn caps(&self, y: &LabelVector) -> Vec<f64> {
        let w = self
            .class_weight_positive
            .unwrap_or_else(|| y.negatives() as f64 / y.positives().max(1) as f64);
        (0..y.len()).map(|i| if y.is_positive(i) { self.c * w } else { self.c }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    /// `αᵢyᵢ`, zero for non-support vectors.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    pub labels: LabelVector,
    pub config: SvmConfig,
    pub training_data_digest: String,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TrainedModel {
    pub fn alphas(&self) -> Vec<f64> {
        self.dual_coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.labels.value(i))
            .collect()
    }
}

fn digest(k: &DMatrix<f64>, y: &LabelVector) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update((k.nrows() as u64).to_le_bytes());
    for v in k.iter() {
        h.update(v.to_le_bytes());
    }
    for s in y.signs() {
        h.update(s.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Trains on a precomputed symmetric PSD kernel matrix.
pub fn train_precomputed(k: &DMatrix<f64>, y: &LabelVector, cfg: &SvmConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let n = y.len();
    if k.nrows() != n || k.ncols() != n {
        return Err(SqsError::Dimension { expected: n, got: k.nrows() });
    }
    y.require_both_classes()?;
    if k.iter().any(|v| !v.is_finite()) {
        return Err(SqsError::Numeric("non-finite kernel entries".into()));
    }

    let mut warnings = Vec::new();
    if n <= 2000 {
        let min_ev = k.clone().symmetric_eigen().eigenvalues.min();
        if min_ev < -1e-6 {
            warnings.push(format!("kernel matrix is not PSD (minimum eigenvalue {min_ev:.3e})"));
        }
    }

    let caps = cfg.caps(y);
    let yv: Vec<f64> = (0..n).map(|i| y.value(i)).collect();
    let q = |i: usize, j: usize| yv[i] * yv[j] * k[(i, j)];
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα
    let mut grad = vec![-1.0; n];

    let budget = cfg.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut converged = false;
    let mut saw_negative_curvature = false;

    while iterations < budget {
        let Some((i, j)) = select_working_set(k, &yv, &alpha, &caps, &grad, cfg.kkt_tolerance, &mut saw_negative_curvature)
        else {
            converged = true;
            break;
        };
        iterations += 1;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ci, cj) = (caps[i], caps[j]);
        if yv[i] != yv[j] {
            let quad = positive_or_tau(k[(i, i)] + k[(j, j)] + 2.0 * q(i, j));
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = positive_or_tau(k[(i, i)] + k[(j, j)] - 2.0 * q(i, j));
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }
    if !converged {
        warnings.push(format!("SMO stopped after {iterations} updates without meeting the KKT tolerance"));
    }
    if saw_negative_curvature {
        warnings.push("negative curvature met during SMO updates".into());
    }

    let bias = -rho(&yv, &alpha, &caps, &grad);
    let objective = -(0..n).map(|t| 0.5 * alpha[t] * (grad[t] - 1.0)).sum::<f64>();
    let dual_coefficients: Vec<f64> = alpha.iter().zip(&yv).map(|(a, y)| a * y).collect();
    let support_indices = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(TrainedModel {
        dual_coefficients,
        bias,
        support_indices,
        labels: y.clone(),
        config: cfg.clone(),
        training_data_digest: digest(k, y),
        objective,
        iterations,
        converged,
        warnings,
    })
}

fn positive_or_tau(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        TAU
    }
}

fn in_up(y: f64, a: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(y: f64, a: f64, c: f64) -> bool {
    (y < 0.0 && a < c) || (y > 0.0 && a > 0.0)
}

/// Second-order working set selection; `None` once the maximal violation is below `tol`.
fn select_working_set(
    k: &DMatrix<f64>,
    y: &[f64],
    alpha: &[f64],
    caps: &[f64],
    grad: &[f64],
    tol: f64,
    negative_curvature: &mut bool,
) -> Option<(usize, usize)> {
    let n = y.len();
    let mut gmax = f64::NEG_INFINITY;
    let mut i_sel = None;
    for t in 0..n {
        if in_up(y[t], alpha[t], caps[t]) {
            let v = -y[t] * grad[t];
            if v > gmax {
                gmax = v;
                i_sel = Some(t);
            }
        }
    }
    let i = i_sel?;
    let mut gmin = f64::INFINITY;
    let mut best_gain = f64::INFINITY;
    let mut j_sel = None;
    for t in 0..n {
        if !in_low(y[t], alpha[t], caps[t]) {
            continue;
        }
        let v = -y[t] * grad[t];
        gmin = gmin.min(v);
        let b = gmax - v;
        if b > 0.0 {
            let a = k[(i, i)] + k[(t, t)] - 2.0 * k[(i, t)];
            if a < -1e-6 {
                *negative_curvature = true;
            }
            let gain = -(b * b) / positive_or_tau(a);
            if gain < best_gain {
                best_gain = gain;
                j_sel = Some(t);
            }
        }
    }
    if gmax - gmin < tol {
        return None;
    }
    j_sel.map(|j| (i, j))
}

fn rho(y: &[f64], alpha: &[f64], caps: &[f64], grad: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= caps[t] {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// `f(xₑ) = Σᵢ coefᵢ·K[e, i] + bias` for each evaluation row.
pub fn decision_values(model: &TrainedModel, k_cross: &DMatrix<f64>) -> Result<Vec<f64>> {
    if k_cross.ncols() != model.dual_coefficients.len() {
        return Err(SqsError::Dimension { expected: model.dual_coefficients.len(), got: k_cross.ncols() });
    }
    Ok((0..k_cross.nrows())
        .map(|e| {
            model
                .support_indices
                .iter()
                .map(|&i| model.dual_coefficients[i] * k_cross[(e, i)])
                .sum::<f64>()
                + model.bias
        })
        .collect())
}

/// Mann–Whitney AUC with ties counted one half, via midranks.
pub fn auc(scores: &[f64], labels: &LabelVector) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(SqsError::Dimension { expected: labels.len(), got: scores.len() });
    }
    labels.require_both_classes()?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(SqsError::Numeric("non-finite score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (doubled) midranks of positives keeps everything integral
    let mut doubled_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        // ranks start..=end (1-based start+1..=end+1), doubled midrank = start+end+2
        let doubled_mid = (start + end + 2) as u128;
        for &idx in &order[start..=end] {
            if labels.is_positive(idx) {
                doubled_rank_sum += doubled_mid;
            }
        }
        start = end + 1;
    }
    let p = labels.positives() as u128;
    let q = labels.negatives() as u128;
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / 2.0 / (p * q) as f64)
}

/// Picks `C` from `grid` by validation AUC on a stratified hold-out of the training rows.
/// Ties go to the smaller value.
pub fn select_c_by_validation(
    k: &DMatrix<f64>,
    y: &LabelVector,
    base: &SvmConfig,
    grid: &[f64],
    fit_fraction: f64,
    seed: u64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(SqsError::Usage("empty C grid".into()));
    }
    let (fit, val) = stratified_indices(y, fit_fraction, seed)?;
    let k_fit = DMatrix::from_fn(fit.len(), fit.len(), |a, b| k[(fit[a], fit[b])]);
    let k_val = DMatrix::from_fn(val.len(), fit.len(), |a, b| k[(val[a], fit[b])]);
    let y_fit = y.subset(&fit);
    let y_val = y.subset(&val);
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = (f64::NEG_INFINITY, sorted[0]);
    for &c in &sorted {
        let cfg = SvmConfig { c, ..base.clone() };
        let model = train_precomputed(&k_fit, &y_fit, &cfg)?;
        let score = auc(&decision_values(&model, &k_val)?, &y_val)?;
        if score > best.0 {
            best = (score, c);
        }
    }
    Ok(best.1)
}

pub fn linear_kernel(a: &[Vec<f64>], b: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| a[i].iter().zip(&b[j]).map(|(u, v)| u * v).sum())
}

pub fn rbf_kernel(a: &[Vec<f64>], b: &[Vec<f64>], gamma: f64) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| {
        let d2: f64 = a[i].iter().zip(&b[j]).map(|(u, v)| (u - v) * (u - v)).sum();
        (-gamma * d2).exp()
    })
}

/// `1 / (d · var(X))` over all entries of the training matrix.
pub fn default_rbf_gamma(rows: &[Vec<f64>]) -> f64 {
    let d = rows.first().map_or(1, Vec::len).max(1);
    let values: Vec<f64> = rows.iter().flatten().copied().collect();
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len().max(1) as f64;
    if var > 0.0 {
        1.0 / (d as f64 * var)
    } else {
        1.0
    }
}
