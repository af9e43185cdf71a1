use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::stream_id;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, UnitPoint};
use crate::metrics::{wce_legendre, SmoothnessParam, WceOptions, VOLUME};
use crate::rng::RngStream;
use crate::samplers::{SamplerKind, SamplerSpec};
use crate::spectral::{concentration_tail, explicit_confidence, BoundParams};
use crate::stats::{log_median_slope, mean_se, median, normal_quantile, quantile_sorted, variance, variance_se, SlopeFit};

/// Standard-error multiple used by the pass/fail rules below.
const SE_MULTIPLE: f64 = 3.0;

/// Test functions for linear statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "f")]
pub enum LinearStatistic {
    /// The height `z`.
    CoordinateZ,
    /// `P_l(z)`, the zonal harmonic of degree `l` about the north pole.
    Zonal { degree: u32 },
}

impl LinearStatistic {
    fn degree(self) -> u32 {
        match self {
            LinearStatistic::CoordinateZ => 1,
            LinearStatistic::Zonal { degree } => degree,
        }
    }

    pub fn eval(self, p: &UnitPoint) -> f64 {
        legendre_p(self.degree(), p.z())
    }

    /// `∫ f dσ` against the normalized surface measure.
    pub fn mean(self) -> f64 {
        if self.degree() == 0 {
            1.0
        } else {
            0.0
        }
    }

    /// `∫ f² dσ`.
    pub fn mean_square(self) -> f64 {
        1.0 / (2 * self.degree() + 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearStatisticSample {
    pub f_spec: LinearStatistic,
    pub y: f64,
}

/// `Σ f(x_i) − N ∫ f dσ`.
pub fn linear_statistic(c: &Configuration, f: LinearStatistic) -> LinearStatisticSample {
    let sum: f64 = c.iter().map(|p| f.eval(p)).sum();
    LinearStatisticSample {
        f_spec: f,
        y: sum - c.len() as f64 * f.mean(),
    }
}

fn legendre_p(l: u32, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Gauss-Legendre nodes and weights on [-1, 1]; exact through degree `2m-1`.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..m {
                let k = k as f64;
                let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Moments of the squared projection kernel of the `N`-point ensemble,
/// `|K(x,y)|² = (N/4π)² ((1+⟨x,y⟩)/2)^{N-1}` against Riemannian volume,
/// evaluated by Gauss-Legendre quadrature in `t = ⟨x,y⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMoments {
    pub n: usize,
    pub degree: u32,
    /// `∫ |K(x,y)|² dV(y)`; the projection property makes this `N/4π`.
    pub square_integral: f64,
    pub identity_error: f64,
    /// Funk-Hecke multiplier of `|K|²` on degree-`l` harmonics.
    pub multiplier: f64,
    /// `Var(Σ f(x_i))` for the zonal test function of that degree.
    pub variance: f64,
    pub nodes: usize,
}

pub fn kernel_square_moments(n: usize, f: LinearStatistic) -> Result<KernelMoments> {
    if n == 0 {
        return Err(Error::invalid("point count must be at least 1"));
    }
    let l = f.degree();
    // The integrands are polynomials of degree N - 1 + l.
    let nodes = (n + l as usize) / 2 + 2;
    let nf = n as f64;
    let scale = (nf / VOLUME).powi(2) * 2.0 * PI;
    let (mut square, mut mult) = (0.0, 0.0);
    for (t, w) in gauss_legendre(nodes) {
        let k2 = ((1.0 + t) / 2.0).powi(n as i32 - 1);
        square += w * k2;
        mult += w * k2 * legendre_p(l, t);
    }
    let square_integral = scale * square;
    let multiplier = scale * mult;
    // ∫ f² K(x,x) dV − ∬ f f |K|² dV dV, with ∫ P_l² dV = 4π/(2l+1).
    let f2 = VOLUME * f.mean_square();
    let variance = nf / VOLUME * f2 - multiplier * f2;
    Ok(KernelMoments {
        n,
        degree: l,
        square_integral,
        identity_error: (square_integral - nf / VOLUME).abs(),
        multiplier,
        variance,
        nodes,
    })
}

/// Samples `count` replicas in parallel; replica `r` uses
/// `stream_id(n_index, r)` under `seed`.
fn map_replicas<T, F>(kind: SamplerKind, n: usize, n_index: usize, count: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Configuration) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|r| {
            let spec = SamplerSpec::new(kind, n, RngStream::new(seed, stream_id(n_index, r)))?;
            f(&spec.sample()?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub kind: SamplerKind,
    pub n: usize,
    pub f_spec: LinearStatistic,
    pub replicas: usize,
    pub sample_variance: f64,
    pub se: f64,
    pub oracle_variance: f64,
    pub z_score: f64,
    /// Pass iff `|z_score| ≤ se_multiple`.
    pub se_multiple: f64,
    /// Projection-identity error of the kernel quadrature (ensemble only).
    pub identity_error: Option<f64>,
    pub pass: bool,
}

/// Sample variance of `Σ f(x_i)` against its exact finite-`N` value: the
/// kernel quadrature for the spherical ensemble, `N ∫ f² dσ − N (∫ f dσ)²`
/// for independent points.
pub fn clt_variance_test(kind: SamplerKind, n: usize, replicas: usize, seed: u64, f: LinearStatistic) -> Result<CltReport> {
    if replicas < 1000 {
        return Err(Error::invalid(format!("variance test needs at least 1000 replicas, got {replicas}")));
    }
    let (oracle, identity_error) = match kind {
        SamplerKind::SphericalEig | SamplerKind::SphericalDpp => {
            let m = kernel_square_moments(n, f)?;
            (m.variance, Some(m.identity_error))
        }
        SamplerKind::IidUniform => (n as f64 * (f.mean_square() - f.mean().powi(2)), None),
        other => return Err(Error::invalid(format!("no variance oracle for sampler {other}"))),
    };
    let ys = map_replicas(kind, n, 0, replicas, seed, |c| Ok(linear_statistic(c, f).y))?;
    let sample_variance = variance(&ys);
    let se = variance_se(&ys);
    let z_score = (sample_variance - oracle) / se;
    Ok(CltReport {
        kind,
        n,
        f_spec: f,
        replicas,
        sample_variance,
        se,
        oracle_variance: oracle,
        z_score,
        se_multiple: SE_MULTIPLE,
        identity_error,
        pass: z_score.abs() <= SE_MULTIPLE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfCell {
    pub c: f64,
    pub mean: f64,
    pub se: f64,
    /// One-sided upper confidence limit `mean + z_conf · se`.
    pub ucl: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// Plain sample mean of `exp(c y)` and its standard error, reported
    /// alongside when the symmetrized estimator is in use.
    pub plain_mean: f64,
    pub plain_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfReport {
    pub kind: SamplerKind,
    pub n: usize,
    pub replicas: usize,
    pub confidence: f64,
    /// Whether `cosh(c y)` replaced `exp(c y)`; see [`mgf_test`].
    pub symmetrized: bool,
    pub cells: Vec<MgfCell>,
}

impl MgfReport {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Empirical `E exp(c Σ z_i)` against `exp(c²/3)`, the Moser-Trudinger
/// bound for `w = c z` whose Dirichlet energy is `8πc²/3`.
///
/// For rotation-invariant samplers `y` and `-y` have the same law, so the
/// mean of `cosh(c y)` is an unbiased estimate of the same quantity with a
/// much smaller variance (the odd part of `exp(c y)` cancels); the pass
/// rule then uses it. The plain mean is always reported.
pub fn mgf_test(kind: SamplerKind, n: usize, c_values: &[f64], replicas: usize, seed: u64, confidence: f64) -> Result<MgfReport> {
    if replicas < 10_000 {
        return Err(Error::invalid(format!("moment test needs at least 10000 replicas, got {replicas}")));
    }
    if !(confidence > 0.5 && confidence < 1.0) {
        return Err(Error::invalid("confidence must lie in (0.5, 1)"));
    }
    let symmetrized = matches!(kind, SamplerKind::SphericalEig | SamplerKind::SphericalDpp | SamplerKind::IidUniform);
    let ys = map_replicas(kind, n, 0, replicas, seed, |c| Ok(linear_statistic(c, LinearStatistic::CoordinateZ).y))?;
    let zq = normal_quantile(confidence);
    let cells = c_values
        .iter()
        .map(|&c| {
            let plain = mean_se(&ys.iter().map(|y| (c * y).exp()).collect::<Vec<_>>());
            let m = if symmetrized {
                mean_se(&ys.iter().map(|y| (c * y).cosh()).collect::<Vec<_>>())
            } else {
                plain
            };
            let bound = (c * c / 3.0).exp();
            let ucl = m.mean + zq * m.se;
            MgfCell {
                c,
                mean: m.mean,
                se: m.se,
                ucl,
                bound,
                margin: bound - ucl,
                pass: ucl <= bound,
                plain_mean: plain.mean,
                plain_se: plain.se,
            }
        })
        .collect();
    Ok(MgfReport {
        kind,
        n,
        replicas,
        confidence,
        symmetrized,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadlineReport {
    pub n: usize,
    pub eta: f64,
    pub replicas: usize,
    pub threshold: f64,
    pub failure_prob: f64,
    pub exceedances: usize,
    /// Pass with no exceedance, warn with one, fail otherwise.
    pub exceedance_verdict: Verdict,
    pub median: f64,
    pub median_pass: bool,
    pub max_tail_bound: f64,
    /// Sorted `wce(·;2)` values; the empirical CDF steps at each.
    pub sorted_values: Vec<f64>,
    /// Independent uniform points at the same `N`, when requested.
    pub iid_median: Option<f64>,
    pub iid_replicas: usize,
}

/// Spherical-ensemble replicas at `N` scored by `wce(·;2)` against the
/// explicit confidence bound for `η`.
pub fn headline_check(n: usize, eta: f64, replicas: usize, iid_replicas: usize, seed: u64, tol: f64) -> Result<HeadlineReport> {
    if !(tol > 0.0 && tol <= 1e-8) {
        return Err(Error::invalid("headline check needs a metric tolerance of at most 1e-8"));
    }
    if replicas == 0 {
        return Err(Error::invalid("replicas must be at least 1"));
    }
    let bound = explicit_confidence(n as u64, eta)?;
    let s2 = SmoothnessParam::new(2.0)?;
    let opts = WceOptions::with_tol(tol);
    let score = |c: &Configuration| wce_legendre(c, s2, &opts);
    let results = map_replicas(SamplerKind::SphericalEig, n, 0, replicas, seed, score)?;
    let mut sorted: Vec<f64> = results.iter().map(|r| r.value).collect();
    sorted.sort_by(f64::total_cmp);
    let exceedances = sorted.iter().filter(|&&v| v > bound.wce_bound).count();
    let iid_median = if iid_replicas > 0 {
        let iid = map_replicas(SamplerKind::IidUniform, n, 1, iid_replicas, seed, |c| Ok(score(c)?.value))?;
        Some(median(&iid))
    } else {
        None
    };
    let med = quantile_sorted(&sorted, 0.5);
    Ok(HeadlineReport {
        n,
        eta,
        replicas,
        threshold: bound.wce_bound,
        failure_prob: bound.failure_prob,
        exceedances,
        exceedance_verdict: match exceedances {
            0 => Verdict::Pass,
            1 => Verdict::Warn,
            _ => Verdict::Fail,
        },
        median: med,
        median_pass: med < bound.wce_bound,
        max_tail_bound: results.iter().map(|r| r.tail_bound).fold(0.0, f64::max),
        sorted_values: sorted,
        iid_median,
        iid_replicas,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub kind: SamplerKind,
    pub s: f64,
    pub replicas: usize,
    pub n_values: Vec<usize>,
    pub medians: Vec<f64>,
    pub fit: SlopeFit,
    pub level: f64,
}

/// Log-log slope of median `wce(·;s)` against `N` with a bootstrap
/// percentile interval at `level`.
pub fn scaling_study(kind: SamplerKind, n_values: &[usize], replicas: usize, s: f64, seed: u64, tol: f64) -> Result<ScalingReport> {
    if n_values.len() < 3 {
        return Err(Error::invalid("scaling study needs at least three values of N"));
    }
    let sp = SmoothnessParam::new(s)?;
    let opts = WceOptions::with_tol(tol);
    let groups = n_values
        .iter()
        .enumerate()
        .map(|(ni, &n)| map_replicas(kind, n, ni, replicas, seed, |c| Ok(wce_legendre(c, sp, &opts)?.value)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
    let level = 0.95;
    let fit = log_median_slope(&xs, &groups, 2000, level, &RngStream::new(seed, u64::MAX))?;
    if !fit.slope.is_finite() {
        return Err(Error::invalid("degenerate slope fit"));
    }
    Ok(ScalingReport {
        kind,
        s,
        replicas,
        n_values: n_values.to_vec(),
        medians: groups.iter().map(|g| median(g)).collect(),
        fit,
        level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationCell {
    pub delta_n: f64,
    pub delta: f64,
    pub exceed_fraction: f64,
    pub se: f64,
    /// The tail bound, or 1 where the parameters are inadmissible.
    pub bound: f64,
    pub admissible: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub kind: SamplerKind,
    pub n: usize,
    pub eps: f64,
    pub replicas: usize,
    pub se_multiple: f64,
    pub cells: Vec<ConcentrationCell>,
}

impl ConcentrationReport {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Empirical `P(wce(·; 2+ε) > δ)` against the concentration bound, for
/// `δ = delta_n / N` over the given grid.
pub fn concentration_test(
    kind: SamplerKind,
    n: usize,
    eps: f64,
    delta_n_grid: &[f64],
    replicas: usize,
    seed: u64,
    tol: f64,
) -> Result<ConcentrationReport> {
    if replicas == 0 || delta_n_grid.is_empty() {
        return Err(Error::invalid("concentration test needs replicas and a nonempty grid"));
    }
    let s = SmoothnessParam::new(2.0 + eps)?;
    let opts = WceOptions::with_tol(tol);
    let norms = map_replicas(kind, n, 0, replicas, seed, |c| Ok(wce_legendre(c, s, &opts)?.value))?;
    let m = replicas as f64;
    let cells = delta_n_grid
        .iter()
        .map(|&dn| {
            let delta = dn / n as f64;
            let p = norms.iter().filter(|&&v| v > delta).count() as f64 / m;
            let se = (p * (1.0 - p) / m).sqrt();
            let tail = BoundParams::from_delta(n as u64, eps, delta).and_then(|b| concentration_tail(&b));
            let (bound, admissible) = match tail {
                Ok(b) => (b, true),
                Err(Error::Inadmissible(_)) => (1.0, false),
                Err(e) => return Err(e),
            };
            Ok(ConcentrationCell {
                delta_n: dn,
                delta,
                exceed_fraction: p,
                se,
                bound,
                admissible,
                pass: p <= bound + SE_MULTIPLE * se,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcentrationReport {
        kind,
        n,
        eps,
        replicas,
        se_multiple: SE_MULTIPLE,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(6);
        let w: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(w, 2.0, epsilon = 1e-14);
        let x10: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert_relative_eq!(x10, 2.0 / 11.0, epsilon = 1e-14);
    }

    #[test]
    fn kernel_identity_and_variance() {
        for n in [1usize, 2, 7, 64, 300] {
            let m = kernel_square_moments(n, LinearStatistic::CoordinateZ).unwrap();
            assert!(m.identity_error <= 1e-10, "n={n}: {}", m.identity_error);
            let nf = n as f64;
            assert_relative_eq!(m.variance, 2.0 * nf / (3.0 * (nf + 1.0)), max_relative = 1e-11);
        }
        // Degree 2: Var = N/5 − (N/5)(N−1)(N−2)/((N+1)(N+2)).
        let m = kernel_square_moments(10, LinearStatistic::Zonal { degree: 2 }).unwrap();
        assert_relative_eq!(m.variance, 2.0 - 2.0 * 9.0 * 8.0 / (11.0 * 12.0), max_relative = 1e-11);
    }

    #[test]
    fn zonal_statistic_of_poles() {
        let c = Configuration::new(vec![UnitPoint::NORTH, UnitPoint::SOUTH]).unwrap();
        assert_eq!(linear_statistic(&c, LinearStatistic::CoordinateZ).y, 0.0);
        assert_relative_eq!(linear_statistic(&c, LinearStatistic::Zonal { degree: 2 }).y, 2.0);
        assert_relative_eq!(linear_statistic(&c, LinearStatistic::Zonal { degree: 0 }).y, 0.0);
    }

    #[test]
    fn small_replica_counts_rejected() {
        assert!(clt_variance_test(SamplerKind::IidUniform, 4, 999, 1, LinearStatistic::CoordinateZ).is_err());
        assert!(mgf_test(SamplerKind::IidUniform, 4, &[1.0], 9999, 1, 0.99).is_err());
        assert!(scaling_study(SamplerKind::IidUniform, &[4, 8], 10, 2.0, 1, 1e-8).is_err());
        assert!(headline_check(10, 3.0, 5, 0, 1, 1e-6).is_err());
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let r = mgf_test(SamplerKind::IidUniform, 3, &[0.0], 10_000, 5, 0.99).unwrap();
        assert_eq!(r.cells[0].mean, 1.0);
        assert_eq!(r.cells[0].bound, 1.0);
        assert!(r.pass());
    }

    #[test]
    fn iid_variance_control() {
        let r = clt_variance_test(SamplerKind::IidUniform, 10, 4000, 17, LinearStatistic::CoordinateZ).unwrap();
        assert_relative_eq!(r.oracle_variance, 10.0 / 3.0);
        assert!(r.pass, "{r:?}");
    }
}
