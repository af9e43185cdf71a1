//! Sphere Laplacian spectrum, zeta sums, Fredholm determinants and the
//! explicit probability bounds built on them.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Truncation cap for every spectral sum in this module.
pub const MAX_DEGREE: u64 = 1 << 27;

/// Eigenvalues `l(l+1)` with multiplicity `2l+1`, `l >= 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereSpectrum;

impl SphereSpectrum {
    /// Upper bound for `Z(1+ε) - 1/ε`.
    pub const C0: f64 = 2.0;
    /// `Z(2)`.
    pub const C1: f64 = 1.0;

    pub fn eigenvalue(l: u64) -> f64 {
        let l = l as f64;
        l * (l + 1.0)
    }

    pub fn multiplicity(l: u64) -> u64 {
        2 * l + 1
    }

    /// `(2l+1) / (l(l+1))^p`.
    #[inline]
    pub fn weight(l: u64, p: f64) -> f64 {
        (2 * l + 1) as f64 * Self::eigenvalue(l).powf(-p)
    }

    /// `∫_x^∞ (2t+1)(t(t+1))^{-p} dt`.
    pub fn weight_integral(x: f64, p: f64) -> f64 {
        (x * (x + 1.0)).powf(1.0 - p) / (p - 1.0)
    }

    /// Two-sided bracket of `Σ_{l>L} weight(l, p)`.
    ///
    /// The weight is completely monotone in `l`, hence convex: midpoint
    /// rule over-estimates the integral from `L+1/2`, trapezoid rule
    /// under-estimates from `L+1`. At `p = 2` the sum telescopes to
    /// `1/(L+1)^2` and both ends coincide.
    pub fn tail_bracket(big_l: u64, p: f64) -> (f64, f64) {
        if p == 2.0 {
            let t = 1.0 / ((big_l + 1) as f64).powi(2);
            return (t, t);
        }
        let l = big_l as f64;
        let lo = Self::weight_integral(l + 1.0, p) + 0.5 * Self::weight(big_l + 1, p);
        let hi = Self::weight_integral(l + 0.5, p);
        (lo, hi.max(lo))
    }
}

/// A truncated spectral sum with a certified absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
    pub truncation: u64,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive, got {tol}")))
    }
}

/// Smallest power-of-two-ish `L` with `half_width(L) <= tol`.
fn choose_truncation(tol: f64, half_width: impl Fn(u64) -> f64) -> Result<u64> {
    let mut l = 8u64;
    while half_width(l) > tol {
        if l >= MAX_DEGREE {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                cap: MAX_DEGREE,
                achievable: half_width(MAX_DEGREE),
            });
        }
        l = (l * 2).min(MAX_DEGREE);
    }
    // Shrink back: half_width is decreasing, so bisect on (l/2, l].
    let (mut lo, mut hi) = (l / 2, l);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if half_width(mid) <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `Σ_{l=1}^{L} weight(l, p)` summed from the small end upward.
pub fn zeta_partial(big_l: u64, p: f64) -> f64 {
    (1..=big_l).rev().map(|l| SphereSpectrum::weight(l, p)).sum()
}

/// Spectral zeta function `Z(p) = Σ_l (2l+1)/(l(l+1))^p`.
pub fn zeta(p: f64, tol: f64) -> Result<Certified> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("zeta diverges for p = {p} (need p > 1)")));
    }
    check_tol(tol)?;
    let half = |l: u64| {
        let (lo, hi) = SphereSpectrum::tail_bracket(l, p);
        0.5 * (hi - lo)
    };
    // Leave room for rounding in the partial sum.
    let big_l = choose_truncation(0.5 * tol, half)?;
    let (lo, hi) = SphereSpectrum::tail_bracket(big_l, p);
    let partial = zeta_partial(big_l, p);
    let rounding = 4.0 * f64::EPSILON * big_l as f64 * partial.abs().max(1.0);
    Ok(Certified {
        value: partial + 0.5 * (lo + hi),
        error: 0.5 * (hi - lo) + rounding,
        truncation: big_l,
    })
}

/// `log D(λ, p) = Σ_l (2l+1) log(1 - λ (l(l+1))^{-p})`.
pub fn fredholm_log_determinant(lambda: f64, p: f64, tol: f64) -> Result<Certified> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("Fredholm determinant needs p > 1, got {p}")));
    }
    let domain = 2f64.powf(p);
    if !(0.0..domain).contains(&lambda) {
        return Err(Error::Domain(format!(
            "Fredholm argument {lambda} outside [0, 2^p) = [0, {domain})"
        )));
    }
    check_tol(tol)?;
    if lambda == 0.0 {
        return Ok(Certified { value: 0.0, error: 0.0, truncation: 0 });
    }
    // Remainder Σ_{l>L} (2l+1)(-log(1-x_l)), x_l = λ λ_l^{-p}, split as
    // λ T_p + R2 with 0 <= R2 - λ² T_{2p}/2 and R2 <= λ² T_{2p} / (2(1-x_{L+1})).
    let bracket = |l: u64| {
        let (t1lo, t1hi) = SphereSpectrum::tail_bracket(l, p);
        let (t2lo, t2hi) = SphereSpectrum::tail_bracket(l, 2.0 * p);
        let x_next = lambda * SphereSpectrum::eigenvalue(l + 1).powf(-p);
        let lo = lambda * t1lo + 0.5 * lambda * lambda * t2lo;
        let hi = lambda * t1hi + 0.5 * lambda * lambda * t2hi / (1.0 - x_next);
        (lo, hi)
    };
    let big_l = choose_truncation(0.5 * tol, |l| {
        let (lo, hi) = bracket(l);
        0.5 * (hi - lo)
    })?;
    let partial: f64 = (1..=big_l)
        .rev()
        .map(|l| {
            let x = lambda * SphereSpectrum::eigenvalue(l).powf(-p);
            (2 * l + 1) as f64 * (-x).ln_1p()
        })
        .sum();
    let (lo, hi) = bracket(big_l);
    let rounding = 4.0 * f64::EPSILON * big_l as f64 * partial.abs().max(1.0);
    Ok(Certified {
        value: partial - 0.5 * (lo + hi),
        error: 0.5 * (hi - lo) + rounding,
        truncation: big_l,
    })
}

/// `D(λ, p) = Π_l (1 - λ λ_l^{-p})^{2l+1}`; `error` refers to the value.
pub fn fredholm_determinant(lambda: f64, p: f64, tol: f64) -> Result<Certified> {
    let log = fredholm_log_determinant(lambda, p, tol.min(1e-2))?;
    let value = log.value.exp();
    Ok(Certified {
        value,
        error: value * log.error.exp_m1(),
        truncation: log.truncation,
    })
}

/// `-log D(λ, p)` through the trace series `Σ_m Z(mp) λ^m / m`.
///
/// The tail uses that `2^q Z(q)` is nonincreasing in `q`, which makes the
/// terms beyond `M` dominated by a geometric series of ratio `λ/2^p`.
pub fn fredholm_log_series(lambda: f64, p: f64, tol: f64) -> Result<Certified> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("trace series needs p > 1, got {p}")));
    }
    let ratio = lambda / 2f64.powf(p);
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::Domain(format!(
            "trace series diverges for λ = {lambda} (need λ < 2^{p})"
        )));
    }
    check_tol(tol)?;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut truncation = 0;
    for m in 1..=10_000u32 {
        let z = zeta(m as f64 * p, 0.25 * tol / 2f64.powi(m.min(60) as i32))?;
        let term = z.value * lambda.powi(m as i32) / m as f64;
        total += term;
        error += z.error * lambda.powi(m as i32) / m as f64;
        truncation = truncation.max(z.truncation);
        // Bound Σ_{k>m} Z(kp) λ^k / k.
        let next = zeta((m + 1) as f64 * p, 1e-3)?;
        let tail = (next.value + next.error) * lambda.powi(m as i32 + 1)
            / ((m + 1) as f64 * (1.0 - ratio));
        if tail <= 0.5 * tol {
            return Ok(Certified { value: total, error: error + tail, truncation });
        }
    }
    Err(Error::ToleranceUnreachable {
        requested: tol,
        cap: 10_000,
        achievable: f64::NAN,
    })
}

/// `c(s', s) = sqrt(Γ(s)/Γ(s') + (s^s e^{-s} + 1)/(Γ(s')(s'-1)))`.
pub fn comparison_constant(s_prime: f64, s: f64) -> Result<f64> {
    if !(s_prime > 1.0 && s_prime <= s && s.is_finite()) {
        return Err(Error::Domain(format!(
            "comparison constant needs 1 < s' <= s, got s' = {s_prime}, s = {s}"
        )));
    }
    let gp = gamma(s_prime);
    let c2 = gamma(s) / gp + (s.powf(s) * (-s).exp() + 1.0) / (gp * (s_prime - 1.0));
    Ok(c2.sqrt())
}

/// Checks `wce(s') <= c(s', s) wce(s)^{s'/s}`. `None` when the premise
/// `wce(s) <= 1` fails and the inequality says nothing.
pub fn comparison_holds(wce_s_prime: f64, wce_s: f64, s_prime: f64, s: f64) -> Result<Option<bool>> {
    let c = comparison_constant(s_prime, s)?;
    if wce_s > 1.0 {
        return Ok(None);
    }
    Ok(Some(wce_s_prime <= c * wce_s.powf(s_prime / s)))
}

fn check_lambda(lam: f64) -> Result<()> {
    if lam > 0.0 && lam < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("λ = {lam} outside (0, 1)")))
    }
}

/// `f(λ) = λ(1/ε + C0 - 1) - log(1 - λ)`.
pub fn f_lambda(lam: f64, eps: f64, c0: f64) -> Result<f64> {
    check_lambda(lam)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε = {eps} must be positive")));
    }
    Ok(lam * (1.0 / eps + c0 - 1.0) - (-lam).ln_1p())
}

/// `f'(λ) = 1/ε + C0 - 1 + 1/(1-λ)`.
pub fn f_lambda_derivative(lam: f64, eps: f64, c0: f64) -> Result<f64> {
    check_lambda(lam)?;
    Ok(1.0 / eps + c0 - 1.0 + 1.0 / (1.0 - lam))
}

/// Parameters of the concentration bound. `δ² = R²/(εN²)`; when built from
/// `η`, `8πR² = 1 + η` and `ε = 1/log N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: u64,
    pub eps: f64,
    pub delta: f64,
    pub r: f64,
    pub eta: Option<f64>,
    /// Fixed λ; the optimal λ* is used when absent.
    pub lam: Option<f64>,
    pub c0: f64,
}

impl BoundParams {
    pub fn from_delta(n: u64, eps: f64, delta: f64) -> Result<Self> {
        if n == 0 || !(eps > 0.0) || !(delta > 0.0) {
            return Err(Error::invalid("need n >= 1, ε > 0, δ > 0"));
        }
        let r = delta * n as f64 * eps.sqrt();
        Ok(BoundParams { n, eps, delta, r, eta: None, lam: None, c0: SphereSpectrum::C0 })
    }

    pub fn from_eta(n: u64, eta: f64) -> Result<Self> {
        if n < 3 || !(eta > 0.0) {
            return Err(Error::invalid("need n >= 3 and η > 0"));
        }
        let eps = 1.0 / (n as f64).ln();
        let r = ((1.0 + eta) / (8.0 * std::f64::consts::PI)).sqrt();
        let delta = r / (n as f64 * eps.sqrt());
        Ok(BoundParams { n, eps, delta, r, eta: Some(eta), lam: None, c0: SphereSpectrum::C0 })
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_lambda(mut self, lam: f64) -> Self {
        self.lam = Some(lam);
        self
    }

    /// `8πδ²N²`, the slope the optimal λ balances against `f'`.
    pub fn exponent_rate(&self) -> f64 {
        8.0 * std::f64::consts::PI * self.r * self.r / self.eps
    }
}

/// `λ* = 1 - ε/(8πR² - 1 - (C0-1)ε)`, checked against `f'(λ*) = 8πδ²N²`.
pub fn optimal_lambda(params: &BoundParams) -> Result<f64> {
    let eight_pi_r2 = 8.0 * std::f64::consts::PI * params.r * params.r;
    let den = eight_pi_r2 - 1.0 - (params.c0 - 1.0) * params.eps;
    if !(den > 0.0) {
        return Err(Error::Inadmissible(format!(
            "need 8πR² > 1 + (C0-1)ε, have 8πR² = {eight_pi_r2}, 1 + (C0-1)ε = {}",
            1.0 + (params.c0 - 1.0) * params.eps
        )));
    }
    let lam = 1.0 - params.eps / den;
    if !(lam > 0.0) {
        return Err(Error::Inadmissible(format!(
            "need 8πR² > 1 + C0·ε for λ* > 0, have 8πR² = {eight_pi_r2}, 1 + C0·ε = {}",
            1.0 + params.c0 * params.eps
        )));
    }
    let slope = f_lambda_derivative(lam, params.eps, params.c0)?;
    let target = params.exponent_rate();
    // Forming 1 - λ* costs a relative error of about ε_mach / (1 - λ*).
    let conditioning = 4.0 * f64::EPSILON / (1.0 - lam);
    if (slope - target).abs() > (1e-10 + conditioning) * target.max(1.0) {
        return Err(Error::Domain(format!(
            "stationarity check failed: f'(λ*) = {slope}, 8πδ²N² = {target}"
        )));
    }
    Ok(lam)
}

/// `P(‖δ_N - σ‖_{H^{-(2+ε)}} > δ) <= exp(-4πδ²N²λ + f(λ)/2)`, clipped to 1.
pub fn concentration_tail(params: &BoundParams) -> Result<f64> {
    let lam = match params.lam {
        Some(l) => l,
        None => optimal_lambda(params)?,
    };
    let f = f_lambda(lam, params.eps, params.c0)?;
    let exponent = -0.5 * params.exponent_rate() * lam + 0.5 * f;
    Ok(exponent.exp().clamp(0.0, 1.0))
}

/// Explicit high-probability bound for `wce(·; 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplicitConfidence {
    pub wce_bound: f64,
    /// `e sqrt((1+η)/(8π)) (log N)^{1/2}`, i.e. `N · wce_bound`.
    pub numerator: f64,
    /// Conservative variant with `η - 2/log N` in the exponent.
    pub failure_prob: f64,
    /// Variant with `η - 1/log N`.
    pub failure_prob_loose: f64,
}

pub fn explicit_confidence(n: u64, eta: f64) -> Result<ExplicitConfidence> {
    if n < 3 {
        return Err(Error::Domain(format!("explicit bound needs N >= 3, got {n}")));
    }
    let log_n = (n as f64).ln();
    if !(eta > 2.0 / log_n) {
        return Err(Error::Domain(format!(
            "explicit bound needs η > 2/log N = {}, got {eta}",
            2.0 / log_n
        )));
    }
    let r2 = (1.0 + eta) / (8.0 * std::f64::consts::PI);
    if r2 < 1.0 / log_n {
        return Err(Error::Domain(format!(
            "explicit bound needs R² = (1+η)/(8π) = {r2} >= 1/log N = {}",
            1.0 / log_n
        )));
    }
    let numerator = std::f64::consts::E * r2.sqrt() * log_n.sqrt();
    let prob = |k: f64| {
        let inner = eta * ((1.0 + eta) / (eta - k / log_n) + 1.0).exp();
        (log_n.sqrt() / (n as f64).powf(eta / 2.0)) * inner.sqrt()
    };
    Ok(ExplicitConfidence {
        wce_bound: numerator / n as f64,
        numerator,
        failure_prob: prob(2.0),
        failure_prob_loose: prob(1.0),
    })
}

/// `det(I - (α/4π) Δ^{-(1+ε)})^{-1/2}`.
pub fn moment_bound_rhs(alpha: f64, eps: f64, tol: f64) -> Result<Certified> {
    let four_pi = 4.0 * std::f64::consts::PI;
    if !(alpha > 0.0 && alpha < four_pi) {
        return Err(Error::Domain(format!("α = {alpha} outside (0, 4π)")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε = {eps} must be positive")));
    }
    let log = fredholm_log_determinant(alpha / four_pi, 1.0 + eps, tol.min(1e-2))?;
    let value = (-0.5 * log.value).exp();
    Ok(Certified {
        value,
        error: value * (0.5 * log.error).exp_m1(),
        truncation: log.truncation,
    })
}

/// Everything the `bounds` command prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub params: BoundParams,
    pub lambda_star: f64,
    pub f_lambda_star: f64,
    pub concentration_tail: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitConfidence>,
}

impl BoundReport {
    pub fn for_eta(n: u64, eta: f64) -> Result<Self> {
        let explicit = explicit_confidence(n, eta)?;
        Self::build(BoundParams::from_eta(n, eta)?, Some(explicit))
    }

    pub fn for_delta(n: u64, eps: f64, delta: f64) -> Result<Self> {
        Self::build(BoundParams::from_delta(n, eps, delta)?, None)
    }

    fn build(params: BoundParams, explicit: Option<ExplicitConfidence>) -> Result<Self> {
        let lambda_star = optimal_lambda(&params)?;
        Ok(BoundReport {
            params,
            lambda_star,
            f_lambda_star: f_lambda(lambda_star, params.eps, params.c0)?,
            concentration_tail: concentration_tail(&params)?,
            explicit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta_two_is_one() {
        let z = zeta(2.0, 1e-13).unwrap();
        assert!((z.value - 1.0).abs() <= 1e-12, "{z:?}");
    }

    #[test]
    fn single_term_partial_sum() {
        assert_eq!(zeta_partial(1, 2.0), 0.75);
    }

    #[test]
    fn zeta_near_one_is_bounded() {
        for eps in [0.01, 0.05, 0.1, 0.5, 1.0] {
            let z = zeta(1.0 + eps, 1e-8).unwrap();
            assert!(z.value + z.error <= 1.0 / eps + 2.0, "eps {eps}: {z:?}");
        }
    }

    #[test]
    fn zeta_rejects_divergent_exponent() {
        assert!(zeta(1.0, 1e-6).is_err());
        assert!(zeta(0.5, 1e-6).is_err());
    }

    #[test]
    fn tail_bracket_contains_brute_force() {
        for p in [1.3, 1.5, 2.5, 3.0] {
            for big_l in [0u64, 1, 5, 40] {
                let brute: f64 = (big_l + 1..2_000_000).rev().map(|l| SphereSpectrum::weight(l, p)).sum::<f64>()
                    + SphereSpectrum::weight_integral(2_000_000.0 - 0.5, p);
                let (lo, hi) = SphereSpectrum::tail_bracket(big_l, p);
                assert!(lo <= brute * (1.0 + 1e-9) && brute <= hi * (1.0 + 1e-9), "p {p} L {big_l}: {lo} {brute} {hi}");
            }
        }
    }

    #[test]
    fn determinant_at_zero_and_monotone() {
        assert_eq!(fredholm_determinant(0.0, 2.0, 1e-10).unwrap().value, 1.0);
        let mut prev = 1.0;
        for k in 1..40 {
            let d = fredholm_determinant(k as f64 * 0.05, 2.0, 1e-10).unwrap().value;
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn determinant_matches_trace_series() {
        let prod = fredholm_log_determinant(0.5, 2.0, 1e-12).unwrap();
        let series = fredholm_log_series(0.5, 2.0, 1e-12).unwrap();
        assert!((-prod.value - series.value).abs() <= 1e-10, "{prod:?} {series:?}");
    }

    #[test]
    fn determinant_domain() {
        assert!(fredholm_determinant(4.0, 2.0, 1e-8).is_err());
        assert!(fredholm_determinant(-0.1, 2.0, 1e-8).is_err());
    }

    #[test]
    fn comparison_constant_values() {
        assert_relative_eq!(
            comparison_constant(2.0, 2.0).unwrap(),
            (2.0 + 4.0 * (-2.0f64).exp()).sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(comparison_constant(2.0, 2.15).unwrap(), 1.636141, epsilon = 1e-5);
        for k in 0..=100 {
            let c = comparison_constant(2.0, 2.0 + 0.15 * k as f64 / 100.0).unwrap();
            assert!(c <= 0.5f64.exp());
        }
        assert!(comparison_constant(2.5, 2.0).is_err());
    }

    #[test]
    fn f_lambda_values() {
        assert_relative_eq!(f_lambda(0.5, 1.0, 2.0).unwrap(), 1.0 + 2f64.ln(), epsilon = 1e-14);
        assert!(f_lambda(1e-12, 1.0, 2.0).unwrap() < 1e-11);
        assert!(f_lambda(0.99, 0.1, 2.0).unwrap() > f_lambda(0.5, 0.1, 2.0).unwrap());
        assert!(f_lambda(1.0, 1.0, 2.0).is_err());
        assert!(f_lambda(0.0, 1.0, 2.0).is_err());
    }

    fn params_with_rate(eps: f64, eight_pi_r2: f64) -> BoundParams {
        let r = (eight_pi_r2 / (8.0 * std::f64::consts::PI)).sqrt();
        BoundParams::from_delta(16, eps, r / (16.0 * eps.sqrt())).unwrap()
    }

    #[test]
    fn optimal_lambda_half() {
        let p = params_with_rate(1.0, 4.0);
        assert_relative_eq!(optimal_lambda(&p).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.exponent_rate(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(concentration_tail(&p).unwrap(), 0.8578, epsilon = 1e-4);
    }

    #[test]
    fn optimal_lambda_boundaries() {
        assert!(matches!(optimal_lambda(&params_with_rate(1.0, 2.0)), Err(Error::Inadmissible(_))));
        assert!(matches!(optimal_lambda(&params_with_rate(1.0, 2.5)), Err(Error::Inadmissible(_))));
        let mut prev = 0.0;
        for k in 1..50 {
            let lam = optimal_lambda(&params_with_rate(0.5, 2.1 + 0.2 * k as f64)).unwrap();
            assert!(lam > prev);
            prev = lam;
        }
    }

    #[test]
    fn explicit_numbers() {
        let e = explicit_confidence(1000, 3.0).unwrap();
        assert!(e.numerator < 2.86 && e.wce_bound < 3e-3);
        assert!(e.failure_prob < 1e-3 && e.failure_prob_loose < e.failure_prob);
        assert!(explicit_confidence(1000, 0.2).is_err());
        assert!(explicit_confidence(2, 3.0).is_err());
    }

    #[test]
    fn moment_bound_series_and_majorant() {
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!((moment_bound_rhs(1e-12, 1.0, 1e-12).unwrap().value - 1.0).abs() < 1e-11);
        for eps in [0.5, 1.0] {
            for x in [0.25, 0.5, 0.75] {
                let m = moment_bound_rhs(x * four_pi, eps, 1e-12).unwrap();
                let s = fredholm_log_series(x, 1.0 + eps, 1e-12).unwrap();
                assert!((m.value.ln() - 0.5 * s.value).abs() <= 1e-10);
                assert!((0.5 * f_lambda(x, eps, 2.0).unwrap()).exp() >= m.value);
            }
        }
    }
}
