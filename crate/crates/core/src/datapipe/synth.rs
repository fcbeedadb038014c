use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqsError};
use crate::fitness::LabelVector;
use crate::rng;

use super::Dataset;

/// Synthetic dataset recipes, tagged by `"generator"` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Two informative features with quadrant-parity classes: a row is positive
    /// when both coordinates share a sign. Cluster centres sit at (±1, ±1).
    Xor {
        n: usize,
        #[serde(default = "default_sigma")]
        sigma: f64,
        #[serde(default)]
        nuisance: usize,
        #[serde(default = "half")]
        positive_rate: f64,
    },
    /// Two Gaussian classes separated along a few informative columns among many noise columns.
    GaussImbalanced {
        n: usize,
        #[serde(default = "default_d")]
        d: usize,
        #[serde(default = "default_informative")]
        informative: usize,
        #[serde(default = "default_rate")]
        positive_rate: f64,
        #[serde(default = "one")]
        separation: f64,
    },
    /// Concentric annuli; positives on the inner ring.
    Rings {
        n: usize,
        #[serde(default = "default_ring_sigma")]
        sigma: f64,
        #[serde(default = "one")]
        inner_radius: f64,
        #[serde(default = "two")]
        outer_radius: f64,
        #[serde(default)]
        nuisance: usize,
        #[serde(default = "half")]
        positive_rate: f64,
    },
}

fn default_sigma() -> f64 {
    0.25
}
fn default_ring_sigma() -> f64 {
    0.1
}
fn half() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_d() -> usize {
    20
}
fn default_informative() -> usize {
    4
}
fn default_rate() -> f64 {
    0.10
}

impl GeneratorSpec {
    pub fn rows(&self) -> usize {
        match *self {
            GeneratorSpec::Xor { n, .. } | GeneratorSpec::GaussImbalanced { n, .. } | GeneratorSpec::Rings { n, .. } => n,
        }
    }

    fn validate(&self) -> Result<()> {
        let (n, rate) = match *self {
            GeneratorSpec::Xor { n, sigma, positive_rate, .. } => {
                check_sigma(sigma)?;
                (n, positive_rate)
            }
            GeneratorSpec::Rings { n, sigma, positive_rate, inner_radius, outer_radius, .. } => {
                check_sigma(sigma)?;
                if !(inner_radius >= 0.0 && outer_radius > inner_radius) {
                    return Err(SqsError::Config("rings need 0 ≤ inner_radius < outer_radius".into()));
                }
                (n, positive_rate)
            }
            GeneratorSpec::GaussImbalanced { n, d, informative, positive_rate, separation } => {
                if d == 0 || d > 350 || informative == 0 || informative > d {
                    return Err(SqsError::Config(format!("gauss-imbalanced needs 1 ≤ informative ≤ d ≤ 350, got {informative}/{d}")));
                }
                if !separation.is_finite() {
                    return Err(SqsError::Config("separation must be finite".into()));
                }
                (n, positive_rate)
            }
        };
        if n < 2 {
            return Err(SqsError::Config(format!("generator needs n ≥ 2, got {n}")));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(SqsError::Config(format!("positive_rate must be in (0, 1), got {rate}")));
        }
        Ok(())
    }

    fn positive_rate(&self) -> f64 {
        match *self {
            GeneratorSpec::Xor { positive_rate, .. }
            | GeneratorSpec::GaussImbalanced { positive_rate, .. }
            | GeneratorSpec::Rings { positive_rate, .. } => positive_rate,
        }
    }
}

fn check_sigma(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(SqsError::Config(format!("sigma must be a finite non-negative number, got {s}")))
    }
}

/// Generates a dataset from `spec`. The positive count is exactly
/// `round(n · positive_rate)`, clamped so both classes appear.
pub fn synth_generate(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.rows();
    let n_pos = ((n as f64 * spec.positive_rate()).round() as usize).clamp(1, n - 1);
    let mut r = rng::stream(seed, &[rng::tag::SYNTH]);
    let mut positive: Vec<bool> = (0..n).map(|i| i < n_pos).collect();
    positive.shuffle(&mut r);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let noise = |sigma: f64, r: &mut rand_chacha::ChaCha8Rng| sigma * std_normal.sample(r);

    let (columns, rows): (Vec<String>, Vec<Vec<f64>>) = match *spec {
        GeneratorSpec::Xor { sigma, nuisance, .. } => {
            let signs = |count: usize, r: &mut rand_chacha::ChaCha8Rng| {
                let mut v: Vec<f64> = (0..count).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
                v.shuffle(r);
                v.into_iter()
            };
            // each class splits evenly between its two quadrants
            let (mut pos_signs, mut neg_signs) = (signs(n_pos, &mut r), signs(n - n_pos, &mut r));
            let rows = positive
                .iter()
                .map(|&p| {
                    let s1 = if p { pos_signs.next() } else { neg_signs.next() }.expect("one sign per row");
                    let s2 = if p { s1 } else { -s1 };
                    let mut row = vec![s1 + noise(sigma, &mut r), s2 + noise(sigma, &mut r)];
                    row.extend((0..nuisance).map(|_| noise(1.0, &mut r)));
                    row
                })
                .collect();
            (feature_names(2 + nuisance), rows)
        }
        GeneratorSpec::GaussImbalanced { d, informative, separation, .. } => {
            let rows = positive
                .iter()
                .map(|&p| {
                    let shift = if p { separation / 2.0 } else { -separation / 2.0 };
                    (0..d)
                        .map(|j| noise(1.0, &mut r) + if j < informative { shift } else { 0.0 })
                        .collect()
                })
                .collect();
            (feature_names(d), rows)
        }
        GeneratorSpec::Rings { sigma, inner_radius, outer_radius, nuisance, .. } => {
            let rows = positive
                .iter()
                .map(|&p| {
                    let radius = if p { inner_radius } else { outer_radius } + noise(sigma, &mut r);
                    let angle = r.random_range(0.0..std::f64::consts::TAU);
                    let mut row = vec![radius * angle.cos(), radius * angle.sin()];
                    row.extend((0..nuisance).map(|_| noise(1.0, &mut r)));
                    row
                })
                .collect();
            (feature_names(2 + nuisance), rows)
        }
    };
    let provenance = format!("synthetic {} seed={seed}", serde_json::to_string(spec)?);
    Dataset::new(columns, rows, LabelVector::from_bools(&positive), provenance)
}

fn feature_names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("f{j}")).collect()
}
