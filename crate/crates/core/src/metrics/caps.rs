//! Spherical cap discrepancies. A cap is `{x : <x, w> >= h}` with area
//! fraction `σ = (1 - h)/2`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, UnitPoint};
use crate::rng::RngStream;

/// Largest `N` accepted by the exact `L∞` enumeration (`O(N^4)`).
pub const EXACT_LINF_MAX_N: usize = 300;
/// Points this close to a candidate boundary count as on it.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapL2Estimate {
    /// Monte-Carlo mean of `(σ(C) - count(C)/N)^2`.
    pub mean_square: f64,
    /// Standard error of `mean_square`.
    pub se: f64,
    pub samples: usize,
}

impl CapL2Estimate {
    /// The discrepancy itself, `sqrt(mean_square)`.
    pub fn value(&self) -> f64 {
        self.mean_square.max(0.0).sqrt()
    }
}

/// Mean-square cap discrepancy under the cap measure with uniform center and
/// height uniform on `[-1, 1]`.
pub fn cap_discrepancy_l2(c: &Configuration, mc_caps: usize, rng: &RngStream) -> Result<CapL2Estimate> {
    if mc_caps == 0 {
        return Err(Error::invalid("need at least one Monte-Carlo cap"));
    }
    let mut r = rng.rng();
    let n = c.len() as f64;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..mc_caps {
        let w = UnitPoint::random(&mut r);
        let h: f64 = r.gen_range(-1.0..=1.0);
        let inside = c.iter().filter(|p| p.cosine(&w) >= h).count() as f64;
        let d = (1.0 - h) / 2.0 - inside / n;
        sum += d * d;
        sum2 += d * d * d * d;
    }
    let m = mc_caps as f64;
    let mean = sum / m;
    let var = if mc_caps > 1 { ((sum2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(CapL2Estimate {
        mean_square: mean,
        se: (var / m).sqrt(),
        samples: mc_caps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum LinfMode {
    /// Enumerates every extremal cap; exact up to [`EXACT_LINF_MAX_N`] points.
    ExactSmallN,
    /// Multi-start local search. The result is a lower bound on the supremum.
    Randomized { starts: usize, seed: u64 },
}

/// `sup_C |σ(C) - count(C)/N|` over spherical caps.
///
/// Since `σ - count/N` on a cap equals `count/N - σ` on its complement, the
/// supremum is that of `count/N - σ` over closed caps. Such a maximum is
/// attained by a cap that is a single point, has two points diametrically
/// on its boundary, or has three points on its boundary.
pub fn cap_discrepancy_linf(c: &Configuration, mode: LinfMode) -> Result<f64> {
    match mode {
        LinfMode::ExactSmallN => {
            if c.len() > EXACT_LINF_MAX_N {
                return Err(Error::invalid(format!(
                    "exact L-infinity discrepancy supports N <= {EXACT_LINF_MAX_N}, got {}; use the randomized mode",
                    c.len()
                )));
            }
            Ok(linf_exact(c))
        }
        LinfMode::Randomized { starts, seed } => {
            if starts == 0 {
                return Err(Error::invalid("randomized mode needs at least one start"));
            }
            Ok(linf_randomized(c, starts, &RngStream::new(seed, 0)))
        }
    }
}

fn coords(c: &Configuration) -> Vec<[f64; 3]> {
    c.iter().map(|p| p.coords()).collect()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Best of the cap `<x, w> >= h` and its closed complement `<x, w> <= h`.
fn both_sides(pts: &[[f64; 3]], w: &[f64; 3], h: f64) -> f64 {
    let n = pts.len() as f64;
    let (mut above, mut below) = (0usize, 0usize);
    for p in pts {
        let d = dot(p, w);
        if d >= h - BOUNDARY_TOL {
            above += 1;
        }
        if d <= h + BOUNDARY_TOL {
            below += 1;
        }
    }
    let sigma_above = (1.0 - h) / 2.0;
    (above as f64 / n - sigma_above).max(below as f64 / n - (1.0 - sigma_above))
}

fn linf_exact(c: &Configuration) -> f64 {
    let pts = coords(c);
    let n = pts.len();
    // Degenerate caps shrinking onto one point (with its duplicates).
    let mut best = pts
        .iter()
        .map(|p| pts.iter().filter(|q| dot(p, q) >= 1.0 - BOUNDARY_TOL).count())
        .max()
        .unwrap_or(0) as f64
        / n as f64;

    let per_i: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = &pts[i];
            let mut local = 0.0f64;
            for j in (i + 1)..n {
                let b = &pts[j];
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                let mn = dot(&m, &m).sqrt();
                if mn > 1e-9 {
                    let w = [m[0] / mn, m[1] / mn, m[2] / mn];
                    local = local.max(both_sides(&pts, &w, dot(&w, a)));
                }
                let ab = sub(b, a);
                for k in (j + 1)..n {
                    let nrm = cross(&ab, &sub(&pts[k], a));
                    let len = dot(&nrm, &nrm).sqrt();
                    if len < 1e-12 {
                        continue;
                    }
                    let w = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                    local = local.max(both_sides(&pts, &w, dot(&w, a)));
                }
            }
            local
        })
        .collect();
    for v in per_i {
        best = best.max(v);
    }
    best
}

/// Best cap with center `w`: sort heights and scan every cut.
fn best_for_center(pts: &[[f64; 3]], w: &[f64; 3], scratch: &mut Vec<f64>) -> f64 {
    let n = pts.len() as f64;
    scratch.clear();
    scratch.extend(pts.iter().map(|p| dot(p, w)));
    scratch.sort_by(|a, b| b.total_cmp(a));
    let mut best = f64::NEG_INFINITY;
    for (k, &h) in scratch.iter().enumerate() {
        // Cap {<x,w> >= h} holds the k+1 highest points, complement the rest.
        let sigma = (1.0 - h) / 2.0;
        best = best.max((k + 1) as f64 / n - sigma);
        best = best.max((scratch.len() - k) as f64 / n - (1.0 - sigma));
    }
    best
}

fn linf_randomized(c: &Configuration, starts: usize, rng: &RngStream) -> f64 {
    let pts = coords(c);
    let mut r = rng.rng();
    let mut scratch = Vec::with_capacity(pts.len());
    let mut best = 0.0f64;
    for _ in 0..starts {
        let mut w = UnitPoint::random(&mut r).coords();
        let mut val = best_for_center(&pts, &w, &mut scratch);
        let mut step = 0.3;
        while step > 1e-6 {
            let mut improved = false;
            for _ in 0..8 {
                let d = UnitPoint::random(&mut r).coords();
                let trial = [w[0] + step * d[0], w[1] + step * d[1], w[2] + step * d[2]];
                let Ok(tp) = UnitPoint::normalized(trial[0], trial[1], trial[2]) else { continue };
                let tw = tp.coords();
                let tv = best_for_center(&pts, &tw, &mut scratch);
                if tv > val {
                    w = tw;
                    val = tv;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(val);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_rotation, Rotation};

    fn random_config(n: usize, seed: u64) -> Configuration {
        let mut rng = RngStream::new(seed, 0).rng();
        Configuration::new((0..n).map(|_| UnitPoint::random(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn single_point_linf_is_one() {
        let c = Configuration::new(vec![UnitPoint::from_spherical(0.3, 1.0)]).unwrap();
        let d = cap_discrepancy_linf(&c, LinfMode::ExactSmallN).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn antipodal_pair_linf() {
        // Best cap: a point, value 1/2; hemisphere through both gives 1 - 1/2.
        let c = Configuration::new(vec![UnitPoint::NORTH, UnitPoint::SOUTH]).unwrap();
        let d = cap_discrepancy_linf(&c, LinfMode::ExactSmallN).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
    }

    #[test]
    fn randomized_never_exceeds_exact() {
        for seed in 0..10 {
            let c = random_config(20, seed);
            let exact = cap_discrepancy_linf(&c, LinfMode::ExactSmallN).unwrap();
            let rand = cap_discrepancy_linf(&c, LinfMode::Randomized { starts: 10, seed }).unwrap();
            assert!(rand <= exact + 1e-12, "{rand} > {exact}");
            assert!(rand >= 0.5 * exact);
        }
    }

    #[test]
    fn exact_mode_size_limit() {
        let c = random_config(EXACT_LINF_MAX_N + 1, 1);
        assert!(cap_discrepancy_linf(&c, LinfMode::ExactSmallN).is_err());
    }

    #[test]
    fn l2_single_point() {
        let c = Configuration::new(vec![UnitPoint::NORTH]).unwrap();
        let e = cap_discrepancy_l2(&c, 40_000, &RngStream::new(4, 0)).unwrap();
        assert!((e.mean_square - 1.0 / 6.0).abs() <= 3.0 * e.se, "{e:?}");
    }

    #[test]
    fn l2_rotation_invariant() {
        let c = random_config(10, 5);
        let rot = Rotation::random(&mut RngStream::new(5, 1).rng());
        let a = cap_discrepancy_l2(&c, 20_000, &RngStream::new(6, 0)).unwrap();
        let b = cap_discrepancy_l2(&apply_rotation(&c, &rot), 20_000, &RngStream::new(7, 0)).unwrap();
        let se = (a.se * a.se + b.se * b.se).sqrt();
        assert!((a.mean_square - b.mean_square).abs() <= 3.0 * se);
    }
}
