use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqs_core::fitness::{alignment_of, max_eigen_fitness, symmetric_max_eigenvalue};
use sqs_core::qkernel::{gram_matrix, inversion_test_estimate, inversion_test_probability, kernel_entry, KernelMode};
use sqs_core::{FeatureMap, Gene, LabelVector};
use sqs_oracles::jacobi_eigenvalues;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn random_fm(rng: &mut ChaCha8Rng, n: usize) -> FeatureMap {
    let genes = (0..rng.random_range(1..=4))
        .map(|_| loop {
            let w: String = (0..n).map(|_| LETTERS[rng.random_range(0..4)]).collect();
            if let Ok(g) = Gene::parse(&w, rng.random_range(0.1..2.0)) {
                break g;
            }
        })
        .collect();
    FeatureMap::new(n, genes).unwrap()
}

fn random_rows(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..n).map(|_| rng.random_range(-3.1..3.1)).collect()).collect()
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[test]
fn self_kernel_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let n = rng.random_range(1..=4);
        let fm = random_fm(&mut rng, n);
        let x = random_rows(&mut rng, 1, n).pop().unwrap();
        assert!((kernel_entry(&fm, &x, &x).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn single_z_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let alpha = rng.random_range(0.1..3.0);
        let (x, x2): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let fm = FeatureMap::new(1, vec![Gene::parse("Z", alpha).unwrap()]).unwrap();
        let expected = (alpha * (x - x2) / 2.0).cos().powi(2);
        assert!((kernel_entry(&fm, &[x], &[x2]).unwrap() - expected).abs() <= 1e-10);
    }
}

#[test]
fn inversion_probability_is_the_kernel_and_shots_concentrate() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let fm = random_fm(&mut rng, n);
        let r = random_rows(&mut rng, 2, n);
        let exact = kernel_entry(&fm, &r[0], &r[1]).unwrap();
        assert!((inversion_test_probability(&fm, &r[0], &r[1]).unwrap() - exact).abs() <= 1e-10);
    }
    for case in 0..50u64 {
        let n = rng.random_range(1..=3);
        let fm = random_fm(&mut rng, n);
        let r = random_rows(&mut rng, 2, n);
        let exact = kernel_entry(&fm, &r[0], &r[1]).unwrap();
        let est = inversion_test_estimate(&fm, &r[0], &r[1], 1_000_000, case).unwrap();
        assert!((est - exact).abs() <= 0.005, "{est} vs {exact}");
    }
}

#[test]
fn shot_noise_matches_binomial_spread() {
    let fm = FeatureMap::new(2, vec![Gene::parse("ZZ", 1.0).unwrap(), Gene::parse("XY", 0.7).unwrap()]).unwrap();
    let (x, x2) = ([0.4, -1.1], [1.3, 0.2]);
    let p = kernel_entry(&fm, &x, &x2).unwrap();
    let shots = 1000u64;
    let samples: Vec<f64> = (0..4000).map(|s| inversion_test_estimate(&fm, &x, &x2, shots, s).unwrap()).collect();
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let sd = (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64).sqrt();
    let expected = (p * (1.0 - p) / shots as f64).sqrt();
    assert!((sd / expected - 1.0).abs() < 0.2, "sd {sd} expected {expected}");
}

#[test]
fn gram_matrices_are_valid_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let fm = random_fm(&mut rng, n);
        let rows = random_rows(&mut rng, 30, n);
        let g = gram_matrix(&fm, &rows).unwrap();
        g.check_structure(1e-10).unwrap();
        let ev = jacobi_eigenvalues(&rows_of(g.as_matrix()));
        assert!(ev[0] >= -1e-8, "min eigenvalue {}", ev[0]);
        for i in 0..5 {
            for j in 0..5 {
                assert!((g.get(i, j) - kernel_entry(&fm, &rows[i], &rows[j]).unwrap()).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn shot_gram_is_symmetric_with_unit_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let fm = random_fm(&mut rng, 2);
    let rows = random_rows(&mut rng, 8, 2);
    let g = KernelMode::Shots { shots: 500, seed: 1 }.gram(&fm, &rows).unwrap();
    g.check_structure(1e-12).unwrap();
    assert_eq!(g, KernelMode::Shots { shots: 500, seed: 1 }.gram(&fm, &rows).unwrap());
}

#[test]
fn max_eigen_fitness_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..500u64 {
        let n = rng.random_range(2..=20);
        let q = rng.random_range(1..=3);
        let fm = random_fm(&mut rng, q);
        let g = gram_matrix(&fm, &random_rows(&mut rng, n, q)).unwrap();
        let k = g.as_matrix().clone();
        let ev = jacobi_eigenvalues(&rows_of(&k));
        let oracle = ev[n - 1] / k.trace();
        let got = max_eigen_fitness(&g, case).unwrap();
        assert!((got - oracle).abs() <= 1e-8, "n={n}: {got} vs {oracle}");
        // general symmetric PSD input, not just unit-diagonal kernels
        let b = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let psd = &b * b.transpose();
        let top = jacobi_eigenvalues(&rows_of(&psd))[n - 1];
        let raw = symmetric_max_eigenvalue(&psd, case).unwrap();
        assert!((raw - top).abs() <= 1e-8 * top.max(1.0), "{raw} vs {top}");
    }
}

#[test]
fn alignment_reference_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(2..30);
        let mut signs: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        signs[0] = true;
        signs[1] = false;
        let y = LabelVector::from_bools(&signs);
        let scale = rng.random_range(0.1..5.0);
        let ideal = DMatrix::from_fn(n, n, |i, j| scale * y.value(i) * y.value(j));
        assert!((alignment_of(&ideal, &y).unwrap() - 1.0).abs() <= 1e-12);
        let id = DMatrix::<f64>::identity(n, n);
        assert!((alignment_of(&id, &y).unwrap() - 1.0 / (n as f64).sqrt()).abs() <= 1e-12);
    }
}
