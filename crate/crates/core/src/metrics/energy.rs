//! Pair-distance functionals: the `s = 3/2` distance form of the
//! worst-case error, generalized distance sums and logarithmic energy.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{SmoothnessParam, WceResult, WceRoute, VOLUME};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::spectral::{zeta, SphereSpectrum};

/// Legendre coefficient of `4/3 - |x - y|` at degree `l >= 1`:
/// `4/((2l-1)(2l+3))`. The degree-0 coefficient vanishes.
pub fn stolarsky_weight(l: u64) -> f64 {
    let l = l as f64;
    4.0 / ((2.0 * l - 1.0) * (2.0 * l + 3.0))
}

/// `κ = 3 Z(3/2) / (16π)`: scales the distance functional so that a single
/// point reproduces `wce(·; 3/2)^2` exactly.
pub fn stolarsky_kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| {
        let z = zeta(1.5, 1e-14).expect("zeta(3/2) converges");
        3.0 * z.value / (4.0 * VOLUME)
    })
}

/// Range of `stolarsky_weight(l) / weight(l, 3/2)` over `l >= 1`. The
/// ratio falls monotonically from its value at `l = 1` to `1/2`, which
/// gives `D / hi <= 4π wce(·;3/2)^2 <= D / lo` for the distance functional `D`.
pub fn stolarsky_ratio_range() -> (f64, f64) {
    (0.5, stolarsky_weight(1) / SphereSpectrum::weight(1, 1.5))
}

/// `4/3 - (1/N²) Σ_{i,j} |x_i - x_j|`.
pub fn distance_functional(c: &Configuration) -> f64 {
    let pts = c.points();
    let n = pts.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += pts[i].chordal_distance(&pts[j]);
        }
    }
    4.0 / 3.0 - 2.0 * sum / (n * n) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceWce {
    /// `sqrt(κ D)`.
    pub wce: WceResult,
    pub kappa: f64,
    pub functional: f64,
}

/// `s = 3/2` error through the distance functional, `sqrt(κ D)`.
///
/// Exact for one point. For larger `N` it is comparable to, not equal to,
/// the spectral `wce(·; 3/2)`: see [`stolarsky_ratio_range`]. The reported
/// tail bound covers rounding in `D` and `κ` only.
pub fn wce_distance_s32(c: &Configuration) -> DistanceWce {
    let kappa = stolarsky_kappa();
    let functional = distance_functional(c);
    let n = c.len() as f64;
    let tail = kappa * (8.0 * f64::EPSILON * n + 1e-13);
    DistanceWce {
        wce: WceResult::from_squared(
            kappa * functional,
            SmoothnessParam::new(1.5).expect("3/2 > 1"),
            0,
            tail,
            WceRoute::DistanceS32,
        ),
        kappa,
        functional,
    }
}

/// `Σ_{i != j} |x_i - x_j|^{2s-2}` over ordered pairs, `1 < s < 2`.
pub fn generalized_sum(c: &Configuration, s: SmoothnessParam) -> Result<f64> {
    let sv = s.get();
    if !(sv < 2.0) {
        return Err(Error::Domain(format!("generalized sum needs 1 < s < 2, got {sv}")));
    }
    let pts = c.points();
    let e = 2.0 * sv - 2.0;
    let mut sum = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].chordal_distance(&pts[j]);
            if d > 0.0 {
                sum += d.powf(e);
            }
        }
    }
    Ok(2.0 * sum)
}

/// `E = -Σ_{i != j} (1/2) log |x_i - x_j|`.
pub fn log_energy(c: &Configuration) -> Result<f64> {
    let pts = c.points();
    let mut sum = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].chordal_distance(&pts[j]);
            if d == 0.0 {
                return Err(Error::InfiniteEnergy(i, j));
            }
            sum -= d.ln();
        }
    }
    Ok(sum)
}
