use num_complex::Complex64;
use proptest::prelude::*;
use sphere_qmc::linalg::{determinant, eigenvalues, gaussian_matrix, ComplexMatrix};
use sphere_qmc::RngStream;

/// Greedy multiset matching; adequate for well separated spectra.
fn max_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_and_determinant(n in 1usize..60, seed in any::<u64>()) {
        let m = gaussian_matrix(n, &RngStream::new(seed, 0)).unwrap();
        let ev = eigenvalues(&m).unwrap();
        prop_assert_eq!(ev.len(), n);
        let sum: Complex64 = ev.iter().sum();
        prop_assert!((sum - m.trace()).norm() <= 1e-8 * n as f64 * m.max_abs());
        let prod: Complex64 = ev.iter().product();
        let det = determinant(&m).unwrap();
        prop_assert!((prod - det).norm() <= 1e-6 * det.norm(), "{prod} vs {det}");
    }

    #[test]
    fn spectrum_scales(n in 1usize..30, seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 0.1);
        let m = gaussian_matrix(n, &RngStream::new(seed, 1)).unwrap();
        let ev = eigenvalues(&m).unwrap();
        let scaled: Vec<Complex64> = ev.iter().map(|z| z * c).collect();
        let ev_c = eigenvalues(&m.scale(c)).unwrap();
        prop_assert!(max_mismatch(&scaled, &ev_c) <= 1e-8 * c.norm() * (1.0 + m.max_abs()) * n as f64);
    }
}

#[test]
fn defective_and_diagonal_inputs() {
    let d: Vec<Complex64> = (0..20).map(|k| Complex64::new(k as f64, -(k as f64) / 3.0)).collect();
    let ev = eigenvalues(&ComplexMatrix::from_diagonal(&d)).unwrap();
    assert!(max_mismatch(&d, &ev) < 1e-12);

    // A Jordan block: eigenvalue 2 with multiplicity 3, perturbation order eps^{1/3}.
    let mut j = ComplexMatrix::from_diagonal(&[Complex64::new(2.0, 0.0); 3]);
    j.row_mut(0)[1] = Complex64::new(1.0, 0.0);
    j.row_mut(1)[2] = Complex64::new(1.0, 0.0);
    for z in eigenvalues(&j).unwrap() {
        assert!((z - 2.0).norm() < 1e-4, "{z}");
    }
}
