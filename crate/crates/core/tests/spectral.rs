use proptest::prelude::*;
use sphere_qmc::spectral::{
    concentration_tail, explicit_confidence, f_lambda, f_lambda_derivative, fredholm_determinant, fredholm_log_series,
    moment_bound_rhs, optimal_lambda, zeta, BoundParams,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeta_decreases_in_p(p in 1.05f64..6.0, dp in 0.01f64..1.0) {
        let a = zeta(p, 1e-10).unwrap();
        let b = zeta(p + dp, 1e-10).unwrap();
        prop_assert!(b.value + b.error < a.value - a.error);
    }

    #[test]
    fn determinant_matches_log_series(lam in 0.01f64..0.9, p in 1.2f64..4.0) {
        let d = fredholm_determinant(lam, p, 1e-12).unwrap();
        let s = fredholm_log_series(lam, p, 1e-12).unwrap();
        prop_assert!((d.value.ln() + s.value).abs() <= 1e-10, "{} vs {}", d.value.ln(), -s.value);
    }

    #[test]
    fn tail_monotone_in_delta_and_eps(n in 4u64..5000, eps in 0.2f64..2.0, delta in 0.02f64..0.5, k in 1.01f64..2.0, e2 in 1.01f64..2.0) {
        let p = BoundParams::from_delta(n, eps, delta).unwrap();
        let (Ok(t0), Ok(t1)) = (concentration_tail(&p), concentration_tail(&BoundParams::from_delta(n, eps, delta * k).unwrap())) else {
            return Ok(());
        };
        prop_assert!(t1 <= t0);
        // At fixed δ the rate 8πδ²N² does not involve ε while f(λ) falls
        // as ε grows (the norm weakens), so the bound cannot increase.
        let t2 = concentration_tail(&BoundParams::from_delta(n, eps * e2, delta).unwrap()).unwrap();
        prop_assert!(t2 <= t0, "eps {eps} -> {}: {t0} -> {t2}", eps * e2);
    }

    #[test]
    fn optimal_lambda_is_stationary_and_minimizes(n in 10u64..100_000, eta in 0.5f64..6.0) {
        let p = BoundParams::from_eta(n, eta).unwrap();
        let Ok(lam) = optimal_lambda(&p) else { return Ok(()) };
        let slope = f_lambda_derivative(lam, p.eps, p.c0).unwrap();
        prop_assert!((slope - p.exponent_rate()).abs() <= 1e-10 * p.exponent_rate());
        let g = |l: f64| -0.5 * p.exponent_rate() * l + 0.5 * f_lambda(l, p.eps, p.c0).unwrap();
        for l in [lam * 0.9, (lam + 1.0) / 2.0] {
            prop_assert!(g(l) >= g(lam) - 1e-12);
        }
    }

    #[test]
    fn moment_rhs_below_exp_half_f(eps in 0.3f64..2.0, x in 0.05f64..0.9) {
        let alpha = 4.0 * std::f64::consts::PI * x;
        let rhs = moment_bound_rhs(alpha, eps, 1e-12).unwrap();
        let majorant = (0.5 * f_lambda(x, eps, 2.0).unwrap()).exp();
        prop_assert!(rhs.value <= majorant * (1.0 + 1e-12), "{} > {majorant}", rhs.value);
        prop_assert!(rhs.value >= 1.0);
    }
}

#[test]
fn zeta_is_dominated_by_first_term_for_large_p() {
    for p in [20.0, 30.0, 40.0] {
        let z = zeta(p, 1e-14 * 3.0 / 2f64.powf(p)).unwrap();
        let first = 3.0 / 2f64.powf(p);
        assert!((z.value / first - 1.0).abs() < 2.0 * (2.0f64 / 6.0).powf(p) * 5.0 / 3.0 + 1e-12, "{p}");
    }
}

#[test]
fn explicit_numbers_at_one_thousand_points() {
    let e = explicit_confidence(1000, 3.0).unwrap();
    assert!(e.numerator < 2.86 && e.numerator > 2.85);
    assert!(e.wce_bound < 2.86e-3);
    assert!(e.failure_prob < 1e-3 && e.failure_prob_loose <= e.failure_prob);
}
