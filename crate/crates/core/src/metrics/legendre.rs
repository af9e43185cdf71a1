use serde::{Deserialize, Serialize};

use super::kernel::legendre_pair_sum;
use super::{PairTable, SmoothnessParam, WceResult, WceRoute, VOLUME};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::spectral::{zeta_partial, SphereSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WceOptions {
    /// Absolute tolerance on `wce^2`.
    pub tol: f64,
    pub max_degree: u64,
    /// Also use `|P_l(cos θ)| <= sqrt(2/(π l sin θ))` in the off-diagonal tails.
    pub bernstein_tail: bool,
}

impl Default for WceOptions {
    fn default() -> Self {
        WceOptions {
            tol: 1e-8,
            max_degree: 1 << 20,
            bernstein_tail: false,
        }
    }
}

impl WceOptions {
    pub fn with_tol(tol: f64) -> Self {
        WceOptions { tol, ..Self::default() }
    }
}

/// `(l(l+1))^{-s}`
fn a(l: u64, s: f64) -> f64 {
    SphereSpectrum::eigenvalue(l).powf(-s)
}

/// Off-diagonal tail, times `(1 - t)`: summation by parts against
/// `Σ_{k<=n} (2k+1) P_k(t) = (n+1)(P_n - P_{n+1})/(1 - t)`.
fn abel_factor(big_l: u64, s: f64) -> f64 {
    let l = big_l as f64;
    2.0 * ((2.0 * l + 3.0) * a(big_l + 1, s) + (l + 1.0).powf(1.0 - 2.0 * s) / (2.0 * s - 1.0))
}

/// Same, with `|P_n| <= β/√n` on the partial sums; multiply by `2β/(1-t)`.
fn bernstein_factor(big_l: u64, s: f64) -> f64 {
    let l = big_l as f64;
    let a1 = a(big_l + 1, s);
    a1 * (l + 1.0) / l.sqrt() + a1 * (l + 2.0) / (l + 1.0).sqrt() + l.powf(0.5 - 2.0 * s) / (2.0 * (2.0 * s - 0.5))
}

/// Certified truncation error on `wce^2` at degree `L`, plus rounding.
fn error_bound(table: &PairTable, big_l: u64, s: f64, bernstein: bool) -> f64 {
    let n = table.n as f64;
    let (lo, hi) = SphereSpectrum::tail_bracket(big_l, s);
    let abel = abel_factor(big_l, s);
    let bern = if bernstein && big_l >= 1 {
        Some(bernstein_factor(big_l, s))
    } else {
        None
    };
    let mut off = 0.0;
    for (&om, &theta) in table.one_minus.iter().zip(&table.angle) {
        let mut e = hi.min(abel / om);
        if let Some(bf) = bern {
            let sin = theta.sin();
            if sin > 0.0 {
                let beta = (2.0 / (std::f64::consts::PI * sin)).sqrt();
                e = e.min(2.0 * beta * bf / om);
            }
        }
        off += e;
    }
    let truncation = (table.diagonal_like() * 0.5 * (hi - lo) + 2.0 * off) / (VOLUME * n * n);
    truncation + rounding_estimate(big_l, s)
}

/// Forward recurrence error is `O(l ε)` in `P_l`, so the pair sum picks up
/// about `ε Σ l w_l <= 2ε Σ l^{2-2s}`, plus accumulation of `L` terms.
fn rounding_estimate(big_l: u64, s: f64) -> f64 {
    let l = big_l.max(1) as f64;
    let e = 3.0 - 2.0 * s;
    let moment = if e.abs() < 1e-12 { 1.0 + l.ln() } else { 1.0 + (l.powf(e) - 1.0) / e };
    4.0 * f64::EPSILON * (2.0 * moment + l.sqrt() * zeta_partial(64, s)) / VOLUME
}

/// Worst-case error via the Legendre expansion of the reproducing kernel,
/// truncated at the smallest degree whose certified tail meets `opts.tol`.
pub fn wce_legendre(c: &Configuration, s: SmoothnessParam, opts: &WceOptions) -> Result<WceResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let table = PairTable::new(c);
    let sv = s.get();
    let bound = |l: u64| error_bound(&table, l, sv, opts.bernstein_tail);

    let mut hi = 1u64;
    while bound(hi) > opts.tol {
        if hi >= opts.max_degree {
            return Err(Error::ToleranceUnreachable {
                requested: opts.tol,
                cap: opts.max_degree,
                achievable: bound(opts.max_degree),
            });
        }
        hi = (hi * 2).min(opts.max_degree);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= opts.tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let big_l = hi;
    Ok(evaluate(&table, s, big_l, bound(big_l)))
}

/// Evaluates at a fixed truncation degree; the tail bound is still certified.
pub fn wce_legendre_at_degree(c: &Configuration, s: SmoothnessParam, big_l: u64) -> WceResult {
    let table = PairTable::new(c);
    let b = error_bound(&table, big_l, s.get(), false);
    evaluate(&table, s, big_l, b)
}

fn evaluate(table: &PairTable, s: SmoothnessParam, big_l: u64, tail_bound: f64) -> WceResult {
    let sv = s.get();
    let n = table.n as f64;
    let weights: Vec<f64> = (0..=big_l)
        .map(|l| if l == 0 { 0.0 } else { SphereSpectrum::weight(l, sv) })
        .collect();
    let (lo, hi) = SphereSpectrum::tail_bracket(big_l, sv);
    let diag = table.diagonal_like() * (zeta_partial(big_l, sv) + 0.5 * (lo + hi));
    let off = 2.0 * legendre_pair_sum(&table.cos, &weights);
    let sq = (diag + off) / (VOLUME * n * n);
    WceResult::from_squared(sq, s, big_l, tail_bound, WceRoute::Legendre)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_rotation, Rotation, UnitPoint};
    use crate::rng::RngStream;

    fn random_config(n: usize, seed: u64) -> Configuration {
        let mut rng = RngStream::new(seed, 0).rng();
        Configuration::new((0..n).map(|_| UnitPoint::random(&mut rng)).collect()).unwrap()
    }

    fn s(v: f64) -> SmoothnessParam {
        SmoothnessParam::new(v).unwrap()
    }

    #[test]
    fn single_point() {
        let c = Configuration::new(vec![UnitPoint::NORTH]).unwrap();
        let r = wce_legendre(&c, s(2.0), &WceOptions::with_tol(1e-12)).unwrap();
        assert!((r.value - 1.0 / VOLUME.sqrt()).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn antipodal_pair_brute_force() {
        let c = Configuration::new(vec![UnitPoint::NORTH, UnitPoint::SOUTH]).unwrap();
        let r = wce_legendre(&c, s(2.0), &WceOptions::with_tol(1e-12)).unwrap();
        // Even degrees only; odd part of the tail telescopes exactly.
        let big = 100_000u64;
        let even: f64 = (1..=big).rev().filter(|l| l % 2 == 0).map(|l| SphereSpectrum::weight(l, 2.0)).sum();
        let oracle = (even + 0.5 / (big + 1) as f64 / (big + 1) as f64) / VOLUME;
        let (lo, hi) = r.squared_bracket();
        assert!(lo - 1e-12 <= oracle && oracle <= hi + 1e-12, "{lo} {oracle} {hi}");
        assert!((r.squared() - oracle).abs() < 1e-11);
    }

    #[test]
    fn tail_bound_is_honest_when_degree_doubles() {
        for (seed, sv) in [(1, 1.3), (2, 1.5), (3, 2.0), (4, 2.5)] {
            let c = random_config(12, seed);
            let coarse = wce_legendre(&c, s(sv), &WceOptions::with_tol(1e-6)).unwrap();
            let fine = wce_legendre_at_degree(&c, s(sv), 2 * coarse.truncation_l);
            assert!((fine.squared() - coarse.squared()).abs() <= coarse.tail_bound, "s {sv}");
            let bern = wce_legendre(&c, s(sv), &WceOptions { bernstein_tail: true, ..WceOptions::with_tol(1e-6) }).unwrap();
            assert!(bern.truncation_l <= coarse.truncation_l);
            assert!((bern.squared() - fine.squared()).abs() <= bern.tail_bound + fine.tail_bound);
        }
    }

    #[test]
    fn rotation_invariant() {
        let c = random_config(30, 9);
        let rot = Rotation::random(&mut RngStream::new(9, 1).rng());
        let a = wce_legendre(&c, s(2.0), &WceOptions::default()).unwrap();
        let b = wce_legendre(&apply_rotation(&c, &rot), s(2.0), &WceOptions::default()).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_finite() {
        let c = Configuration::new(vec![UnitPoint::NORTH, UnitPoint::NORTH]).unwrap();
        let r = wce_legendre(&c, s(2.0), &WceOptions::with_tol(1e-12)).unwrap();
        assert!((r.value - 1.0 / VOLUME.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn unreachable_tolerance_reports_cap() {
        let c = random_config(5, 3);
        let opts = WceOptions { tol: 1e-14, max_degree: 64, bernstein_tail: false };
        assert!(matches!(
            wce_legendre(&c, s(1.3), &opts),
            Err(Error::ToleranceUnreachable { cap: 64, .. })
        ));
    }
}
