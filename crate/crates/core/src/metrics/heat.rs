//! Worst-case error through the heat kernel:
//! `wce^2 = (1/Γ(s)) ∫_0^∞ t^{s-1} g(t) dt`.
//!
//! The integral is split into three pieces:
//! * `(0, t_lo)`: diagonal terms in closed form via incomplete gamma
//!   functions; off-diagonal pairs contribute `-1` each because their
//!   Gaussian bump `e^{-θ²/4t}` is below `e^{-60}` there.
//! * `[t_lo, T]`: adaptive Gauss–Kronrod in `u = ln t`, each `g(t)`
//!   truncated with its own certified tail.
//! * `(T, ∞)`: `g(t) <= g(T) e^{-2(t-T)}` (every spectral coefficient of
//!   `g` is nonnegative and `λ_1 = 2`), integrated exactly.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use super::kernel::legendre_pair_sum;
use super::{PairTable, SmoothnessParam, WceResult, WceRoute, VOLUME};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::spectral::{zeta, SphereSpectrum};

/// Pairs closer than this make the small-time cutoff too expensive.
const MIN_PAIR_ANGLE: f64 = 1e-4;
/// `θ²/t` above which the off-diagonal heat kernel is treated as zero.
const GAUSSIAN_CUTOFF: f64 = 240.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelEval {
    pub t: f64,
    pub value: f64,
    pub truncation_l: u64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Absolute tolerance on `wce^2`.
    pub tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            tol: 1e-8,
            max_intervals: 4000,
        }
    }
}

/// Smallest `L` with `t(2L+1)^2 >= 2` and `e^{-tL(L+1)}/(4πt) <= tau`; past
/// the first condition the summand `(2l+1)e^{-tl(l+1)}` is decreasing, so
/// its tail is at most `∫_L^∞ = e^{-tL(L+1)}/t`.
fn heat_truncation(t: f64, tau: f64) -> u64 {
    let monotone = (((2.0 / t).sqrt() - 1.0) / 2.0).ceil().max(1.0);
    let x = (1.0 / (VOLUME * t * tau)).ln();
    let decay = if x > 0.0 {
        ((-1.0 + (1.0 + 4.0 * x / t).sqrt()) / 2.0).ceil()
    } else {
        1.0
    };
    let mut l = monotone.max(decay) as u64;
    while heat_tail(t, l) > tau {
        l += 1;
    }
    l
}

fn heat_tail(t: f64, l: u64) -> f64 {
    (-t * SphereSpectrum::eigenvalue(l)).exp() / (VOLUME * t)
}

fn g_eval(table: &PairTable, t: f64, tau: f64) -> HeatKernelEval {
    let n = table.n as f64;
    let big_l = heat_truncation(t, tau);
    let weights: Vec<f64> = (0..=big_l)
        .map(|l| {
            if l == 0 {
                0.0
            } else {
                (2 * l + 1) as f64 * (-t * SphereSpectrum::eigenvalue(l)).exp()
            }
        })
        .collect();
    let diag: f64 = weights.iter().rev().sum::<f64>() * table.diagonal_like();
    let off = 2.0 * legendre_pair_sum(&table.cos, &weights);
    HeatKernelEval {
        t,
        value: (diag + off) / (VOLUME * n * n),
        truncation_l: big_l,
        tail_bound: heat_tail(t, big_l),
    }
}

/// `g(t) = (1/(4πN²)) Σ_{i,j} Σ_{l>=1} (2l+1) e^{-t l(l+1)} P_l(<x_i, x_j>)`.
pub fn g_of_t(c: &Configuration, t: f64, tol: f64) -> Result<HeatKernelEval> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("g(t) needs t > 0, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(g_eval(&PairTable::new(c), t, tol))
}

// Gauss–Kronrod 7/15 on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    trunc: u64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &impl Fn(f64) -> (f64, u64), a: f64, b: f64) -> Interval {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, mut trunc) = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, l1) = f(c - dx);
        let (f2, l2) = f(c + dx);
        trunc = trunc.max(l1).max(l2);
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Interval {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
        trunc,
    }
}

/// Worst-case error by integrating `g` against `t^{s-1}/Γ(s)`; an
/// oracle for [`super::wce_legendre`] that shares none of its tail analysis.
/// The series tails in `tail_bound` are certified; the Gauss-Kronrod part
/// is the usual embedded-rule estimate.
pub fn wce_heat_kernel(c: &Configuration, s: SmoothnessParam, quad: &QuadSpec) -> Result<WceResult> {
    if !(quad.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", quad.tol)));
    }
    let table = PairTable::new(c);
    let sv = s.get();
    let n = table.n as f64;
    let norm = 1.0 / (VOLUME * n * n);
    let gamma_s = gamma(sv);

    let min_angle = table.angle.iter().copied().fold(f64::INFINITY, f64::min);
    if min_angle < MIN_PAIR_ANGLE {
        return Err(Error::QuadratureFailure {
            requested: quad.tol,
            achieved: f64::INFINITY,
            reason: format!("pair angle {min_angle:.3e} below {MIN_PAIR_ANGLE:.0e}"),
        });
    }
    let t_lo = (min_angle * min_angle / GAUSSIAN_CUTOFF).min(1e-2);
    let off_ordered = 2.0 * table.cos.len() as f64;

    // (0, t_lo)
    let diag_small = {
        // Σ_l (2l+1) λ_l^{-s} P(s, t_lo λ_l) = Z(s) - Σ_l (2l+1) λ_l^{-s} Q(s, t_lo λ_l)
        let z = zeta(sv, 1e-3 * quad.tol)?;
        let mut upper = 0.0;
        let mut l = 1u64;
        loop {
            let q = gamma_ur(sv, t_lo * SphereSpectrum::eigenvalue(l));
            upper += SphereSpectrum::weight(l, sv) * q;
            if q < 1e-20 {
                break;
            }
            l += 1;
        }
        let (_, tail_hi) = SphereSpectrum::tail_bracket(l, sv);
        let trunc = 1e-20 * tail_hi;
        (table.diagonal_like() * (z.value - upper) * norm, table.diagonal_like() * (z.error + trunc) * norm)
    };
    let off_small = -off_ordered * t_lo.powf(sv) / gamma(sv + 1.0) * norm;

    // (T, ∞)
    let large_tol = quad.tol / 8.0;
    let mut t_hi = 4.0;
    let large = loop {
        let g = g_eval(&table, t_hi, 1e-30);
        let gu = (g.value + g.tail_bound).max(0.0);
        let bound = gu * (2.0 * t_hi + gamma_ur(sv, 2.0 * t_hi).ln()).exp() * 2f64.powf(-sv);
        if bound <= large_tol || t_hi >= 400.0 {
            break bound;
        }
        t_hi *= 1.5;
    };

    // [t_lo, T] in u = ln t.
    let (u_lo, u_hi) = (t_lo.ln(), t_hi.ln());
    let trunc_budget = quad.tol / 4.0;
    let tau0 = trunc_budget * gamma_s / (u_hi - u_lo);
    let integrand = |u: f64| {
        let t = u.exp();
        let ts = t.powf(sv);
        let g = g_eval(&table, t, tau0 / ts);
        (ts * g.value / gamma_s, g.truncation_l)
    };
    let pieces = ((u_hi - u_lo).ceil() as usize).max(4);
    let mut heap: BinaryHeap<Interval> = (0..pieces)
        .map(|k| {
            let a = u_lo + (u_hi - u_lo) * k as f64 / pieces as f64;
            let b = u_lo + (u_hi - u_lo) * (k + 1) as f64 / pieces as f64;
            gk15(&integrand, a, b)
        })
        .collect();
    let quad_tol = quad.tol / 2.0;
    loop {
        let err: f64 = heap.iter().map(|i| i.error).sum();
        if err <= quad_tol {
            break;
        }
        if heap.len() >= quad.max_intervals {
            return Err(Error::QuadratureFailure {
                requested: quad.tol,
                achieved: err,
                reason: format!("interval cap {} reached", quad.max_intervals),
            });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gk15(&integrand, worst.a, mid));
        heap.push(gk15(&integrand, mid, worst.b));
    }
    let mut intervals = heap.into_vec();
    intervals.sort_by(|x, y| x.a.total_cmp(&y.a));
    let middle: f64 = intervals.iter().map(|i| i.value).sum();
    let quad_err: f64 = intervals.iter().map(|i| i.error).sum();
    let truncation_l = intervals.iter().map(|i| i.trunc).max().unwrap_or(0);

    let sq = diag_small.0 + off_small + middle + 0.5 * large;
    let tail_bound = diag_small.1 + quad_err + trunc_budget + 0.5 * large;
    Ok(WceResult::from_squared(sq, s, truncation_l, tail_bound, WceRoute::HeatKernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::UnitPoint;
    use crate::metrics::{wce_legendre, WceOptions};
    use crate::rng::RngStream;

    fn random_config(n: usize, seed: u64) -> Configuration {
        let mut rng = RngStream::new(seed, 0).rng();
        Configuration::new((0..n).map(|_| UnitPoint::random(&mut rng)).collect()).unwrap()
    }

    fn s(v: f64) -> SmoothnessParam {
        SmoothnessParam::new(v).unwrap()
    }

    #[test]
    fn single_point_value() {
        let c = Configuration::new(vec![UnitPoint::NORTH]).unwrap();
        let r = wce_heat_kernel(&c, s(2.0), &QuadSpec::default()).unwrap();
        assert!((r.value - 1.0 / VOLUME.sqrt()).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn single_point_leading_term() {
        let c = Configuration::new(vec![UnitPoint::SOUTH]).unwrap();
        let t = 3.0;
        let g = g_of_t(&c, t, 1e-15).unwrap();
        let lead = 3.0 / VOLUME * (-2.0 * t).exp();
        // Next term is 5 e^{-6t}/(4π).
        assert!(((g.value - lead) / lead).abs() <= 2.0 * (-4.0 * t).exp());
    }

    #[test]
    fn g_nonnegative_and_nonincreasing() {
        for seed in 0..20 {
            let c = random_config(2 + seed as usize % 9, seed);
            let mut prev = f64::INFINITY;
            for k in 0..30 {
                let t = 1e-3 * 1.4f64.powi(k);
                let g = g_of_t(&c, t, 1e-12).unwrap();
                assert!(g.value >= -g.tail_bound);
                assert!(g.value <= prev + 2e-12, "seed {seed} t {t}");
                prev = g.value;
            }
        }
    }

    #[test]
    fn routes_agree() {
        for (n, sv, seed) in [(16, 2.0, 1), (8, 1.5, 2), (6, 1.3, 3), (10, 2.5, 4)] {
            let c = random_config(n, seed);
            let h = wce_heat_kernel(&c, s(sv), &QuadSpec { tol: 1e-9, ..QuadSpec::default() }).unwrap();
            let l = wce_legendre(&c, s(sv), &WceOptions::with_tol(1e-9)).unwrap();
            let diff = (h.squared() - l.squared()).abs();
            assert!(diff <= h.tail_bound + l.tail_bound, "n {n} s {sv}: {h:?} {l:?}");
        }
    }

    #[test]
    fn near_coincident_pair_is_rejected() {
        let p = UnitPoint::from_spherical(1e-6, 0.0);
        let c = Configuration::new(vec![UnitPoint::NORTH, p]).unwrap();
        assert!(matches!(
            wce_heat_kernel(&c, s(2.0), &QuadSpec::default()),
            Err(Error::QuadratureFailure { .. })
        ));
    }
}
