use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};

use super::{mutual_info_rank, Dataset};

/// Fitted select → standardize → project → angle-range pipeline.
///
/// Every statistic comes from the training rows passed to [`fit_reduction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionModel {
    pub selected_columns: Vec<String>,
    pub mi_scores: Vec<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// `k × r`, row-major; column 0 is the Fisher direction.
    pub projection: Vec<Vec<f64>>,
    pub projected_min: Vec<f64>,
    pub projected_max: Vec<f64>,
}

impl ReductionModel {
    pub fn out_dim(&self) -> usize {
        self.projected_min.len()
    }

    pub fn projection_matrix(&self) -> DMatrix<f64> {
        let k = self.projection.len();
        let r = self.out_dim();
        DMatrix::from_fn(k, r, |i, j| self.projection[i][j])
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.means).zip(&self.stds).map(|((v, m), s)| (v - m) / s).collect()
    }

    fn project(&self, z: &[f64]) -> Vec<f64> {
        (0..self.out_dim())
            .map(|c| z.iter().enumerate().map(|(i, v)| v * self.projection[i][c]).sum())
            .collect()
    }

    /// Projected coordinates before the angle-range map.
    pub fn project_raw(&self, selected: &[f64]) -> Vec<f64> {
        self.project(&self.standardize(selected))
    }

    fn to_angle_range(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .enumerate()
            .map(|(c, &v)| {
                let (lo, hi) = (self.projected_min[c], self.projected_max[c]);
                if hi > lo {
                    (-PI + 2.0 * PI * (v - lo) / (hi - lo)).clamp(-PI, PI)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn orient(v: &mut DVector<f64>) {
    let (idx, _) = v.iamax_full();
    if v[idx] < 0.0 {
        v.neg_mut();
    }
}

/// Orthonormal basis of the complement of unit vector `w`, from a Householder reflector.
fn complement_basis(w: &DVector<f64>) -> DMatrix<f64> {
    let k = w.len();
    let mut v = w.clone();
    let sign = if w[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vv = v.dot(&v);
    let h = DMatrix::identity(k, k) - (&v * v.transpose()) * (2.0 / vv);
    h.columns(1, k - 1).into_owned()
}

/// Fits the reduction on training rows.
///
/// The `top_k` columns with highest mutual information are z-scored. The first
/// output direction is the Fisher discriminant `S_w⁻¹(μ₊ − μ₋)` with `S_w`
/// ridge-regularized by `1e-6·mean(diag S_w)`. Remaining directions are the
/// leading principal components inside the orthogonal complement of it.
pub fn fit_reduction(d: &Dataset, top_k: usize, out_dim: usize, bins: usize) -> Result<ReductionModel> {
    d.labels.require_both_classes()?;
    let k = top_k.min(d.dim());
    if out_dim == 0 || out_dim > k {
        return Err(SqsError::Usage(format!("output dimension {out_dim} must be in 1..={k}")));
    }
    let ranked = mutual_info_rank(d, bins)?;
    let chosen: Vec<(usize, f64)> = ranked.into_iter().take(k).collect();
    let n = d.len() as f64;

    let means: Vec<f64> = chosen.iter().map(|&(j, _)| d.rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let stds: Vec<f64> = chosen
        .iter()
        .zip(&means)
        .map(|(&(j, _), m)| {
            let var = d.rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let z: Vec<DVector<f64>> = d
        .rows
        .iter()
        .map(|r| DVector::from_fn(k, |i, _| (r[chosen[i].0] - means[i]) / stds[i]))
        .collect();

    let class_mean = |positive: bool| -> DVector<f64> {
        let members: Vec<&DVector<f64>> = z
            .iter()
            .enumerate()
            .filter(|(i, _)| d.labels.is_positive(*i) == positive)
            .map(|(_, v)| v)
            .collect();
        members.iter().fold(DVector::zeros(k), |acc, v| acc + *v) / members.len() as f64
    };
    let mu_pos = class_mean(true);
    let mu_neg = class_mean(false);
    let mut scatter = DMatrix::<f64>::zeros(k, k);
    for (i, v) in z.iter().enumerate() {
        let c = if d.labels.is_positive(i) { v - &mu_pos } else { v - &mu_neg };
        scatter += &c * c.transpose();
    }
    let ridge = 1e-6 * scatter.diagonal().mean();
    let ridge = if ridge > 0.0 { ridge } else { 1e-12 };
    for i in 0..k {
        scatter[(i, i)] += ridge;
    }
    let chol = scatter
        .cholesky()
        .ok_or_else(|| SqsError::Numeric("within-class scatter is singular after regularization".into()))?;
    let mut w = chol.solve(&(&mu_pos - &mu_neg));
    let norm = w.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(SqsError::Numeric("degenerate Fisher direction (identical class means)".into()));
    }
    w /= norm;

    let mut directions = vec![w.clone()];
    if out_dim > 1 {
        let basis = complement_basis(&w);
        let cov = z.iter().fold(DMatrix::<f64>::zeros(k, k), |acc, v| acc + v * v.transpose()) / n;
        let reduced = basis.transpose() * &cov * &basis;
        let eig = reduced.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        for &idx in order.iter().take(out_dim - 1) {
            let mut dir = &basis * eig.eigenvectors.column(idx);
            dir /= dir.norm();
            orient(&mut dir);
            directions.push(dir);
        }
    }
    let projection: Vec<Vec<f64>> = (0..k).map(|i| directions.iter().map(|dir| dir[i]).collect()).collect();

    let mut model = ReductionModel {
        selected_columns: chosen.iter().map(|&(j, _)| d.columns[j].clone()).collect(),
        mi_scores: chosen.iter().map(|&(_, s)| s).collect(),
        means,
        stds,
        projection,
        projected_min: vec![f64::INFINITY; out_dim],
        projected_max: vec![f64::NEG_INFINITY; out_dim],
    };
    for zi in &z {
        let p = model.project(zi.as_slice());
        for c in 0..out_dim {
            model.projected_min[c] = model.projected_min[c].min(p[c]);
            model.projected_max[c] = model.projected_max[c].max(p[c]);
        }
    }
    Ok(model)
}

/// Select → standardize → project → map each output column into `[−π, π]`.
pub fn apply_reduction(model: &ReductionModel, d: &Dataset) -> Result<Dataset> {
    let idx: Vec<usize> = model
        .selected_columns
        .iter()
        .map(|name| {
            d.columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| SqsError::Usage(format!("column {name:?} missing from dataset")))
        })
        .collect::<Result<_>>()?;
    let rows = d
        .rows
        .iter()
        .map(|r| {
            let selected: Vec<f64> = idx.iter().map(|&j| r[j]).collect();
            model.to_angle_range(&model.project_raw(&selected))
        })
        .collect();
    Ok(Dataset {
        columns: (0..model.out_dim()).map(|c| format!("c{c}")).collect(),
        rows,
        labels: d.labels.clone(),
        ids: d.ids.clone(),
        provenance: format!("{} (reduced)", d.provenance),
    })
}
