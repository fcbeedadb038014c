//! Brute-force reference computations for the test suites.
//!
//! Nothing here shares code with `sqs-core`: matrices are built explicitly,
//! eigenvalues come from cyclic Jacobi sweeps, the SVM dual is solved by
//! accelerated projected gradient, and AUC by pairwise enumeration. The
//! functions are slow on purpose and only meant for small inputs.

use num_complex::Complex64;

pub type CMatrix = Vec<Vec<Complex64>>;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { Complex64::new(1.0, 0.0) } else { czero() }).collect())
        .collect()
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let mut out = vec![vec![czero(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            let aik = a[i][k];
            if aik == czero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `a ⊗ b` with `a` on the more significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![czero(); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn single_pauli(letter: char) -> CMatrix {
    let o = czero();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match letter {
        'I' => vec![vec![one, o], vec![o, one]],
        'X' => vec![vec![o, one], vec![one, o]],
        'Y' => vec![vec![o, -i], vec![i, o]],
        'Z' => vec![vec![one, o], vec![o, -one]],
        _ => panic!("bad letter {letter}"),
    }
}

/// Dense matrix of a Pauli word, letter `q` acting on bit `q` of the index.
pub fn pauli_matrix(word: &str) -> CMatrix {
    let letters: Vec<char> = word.chars().collect();
    // highest qubit is the leftmost Kronecker factor
    letters
        .iter()
        .rev()
        .fold(vec![vec![Complex64::new(1.0, 0.0)]], |acc, &c| kron(&acc, &single_pauli(c)))
}

pub fn hadamard_layer(qubits: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = vec![
        vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ];
    (0..qubits).fold(vec![vec![Complex64::new(1.0, 0.0)]], |acc, _| kron(&acc, &h))
}

fn scale(a: &CMatrix, s: Complex64) -> CMatrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

fn add(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let dim = a.len();
    let norm = max_abs(a) * dim as f64;
    let mut squarings = 0;
    let mut scaled = a.clone();
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        scaled = scale(a, Complex64::new(0.5f64.powi(squarings as i32), 0.0));
    }
    let mut result = identity(dim);
    let mut term = identity(dim);
    for k in 1..=30 {
        term = scale(&matmul(&term, &scaled), Complex64::new(1.0 / k as f64, 0.0));
        result = add(&result, &term);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// `exp(−iθ/2·P)` as an explicit dense exponential.
pub fn rotation_matrix(word: &str, theta: f64) -> CMatrix {
    expm(&scale(&pauli_matrix(word), Complex64::new(0.0, -theta / 2.0)))
}

/// Encodes `x` by building the full unitary `Π R · H^{⊗n}` and applying it to `|0…0⟩`.
pub fn encode_dense(qubits: usize, genes: &[(&str, f64)], x: &[f64]) -> Vec<Complex64> {
    let mut u = hadamard_layer(qubits);
    for (word, alpha) in genes {
        let theta = word
            .chars()
            .zip(x)
            .filter(|(c, _)| *c != 'I')
            .fold(*alpha, |acc, (_, v)| acc * v);
        u = matmul(&rotation_matrix(word, theta), &u);
    }
    let mut zero = vec![czero(); 1 << qubits];
    zero[0] = Complex64::new(1.0, 0.0);
    matvec(&u, &zero)
}

/// All eigenvalues of a real symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Dual objective `Σα − ½ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ`.
pub fn svm_dual_objective(k: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 ≤ αᵢ ≤ capᵢ, Σ αᵢyᵢ = 0}` by bisection on the multiplier.
fn project_box_hyperplane(v: &[f64], y: &[f64], caps: &[f64]) -> Vec<f64> {
    let at = |mu: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .zip(caps)
            .map(|((&vi, &yi), &ci)| (vi - mu * yi).clamp(0.0, ci))
            .collect()
    };
    let g = |mu: f64| at(mu).iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    // g is non-increasing in mu
    let mut lo = -1.0;
    let mut hi = 1.0;
    while g(lo) < 0.0 {
        lo *= 2.0;
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Solves the soft-margin SVM dual by accelerated projected gradient ascent.
/// Returns `(alpha, objective)`.
pub fn svm_dual_projected_gradient(k: &[Vec<f64>], y: &[f64], caps: &[f64], iterations: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| y[i] * y[j] * k[i][j]).collect()).collect();
    let lipschitz = jacobi_eigenvalues(&q).last().copied().unwrap_or(1.0).max(1e-12);
    let step = 1.0 / lipschitz;
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n).map(|i| 1.0 - (0..n).map(|j| q[i][j] * a[j]).sum::<f64>()).collect()
    };
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut best = (x.clone(), svm_dual_objective(k, y, &x));
    for _ in 0..iterations {
        let gz = grad(&z);
        let cand: Vec<f64> = z.iter().zip(&gz).map(|(a, g)| a + step * g).collect();
        let x_next = project_box_hyperplane(&cand, y, caps);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = x_next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        x = x_next;
        t = t_next;
        let obj = svm_dual_objective(k, y, &x);
        if obj > best.1 {
            best = (x.clone(), obj);
        } else {
            // restart momentum when the objective stalls
            z = x.clone();
            t = 1.0;
        }
    }
    best
}

/// Mann–Whitney AUC by enumerating every (positive, negative) pair.
pub fn auc_pairwise(scores: &[f64], positive: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut row = r.clone();
        row.push(bi);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()).unwrap();
        m.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}
