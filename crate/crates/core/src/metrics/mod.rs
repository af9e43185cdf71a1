//! Quality functionals of a configuration: Sobolev worst-case error by two
//! independent routes, cap discrepancies, distance sums and energies.

mod caps;
mod energy;
mod heat;
mod kernel;
mod legendre;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Configuration;

pub use caps::{cap_discrepancy_l2, cap_discrepancy_linf, CapL2Estimate, LinfMode, EXACT_LINF_MAX_N};
pub use energy::{
    distance_functional, generalized_sum, log_energy, stolarsky_kappa, stolarsky_ratio_range, stolarsky_weight,
    wce_distance_s32,
    DistanceWce,
};
pub use heat::{g_of_t, wce_heat_kernel, HeatKernelEval, QuadSpec};
pub use kernel::legendre_pair_sum;
pub use legendre::{wce_legendre, wce_legendre_at_degree, WceOptions};

/// Total mass of the Riemannian volume of the unit sphere. The Sobolev
/// pairing is taken against this measure, so spectral sums carry `1/VOLUME`.
pub const VOLUME: f64 = 4.0 * std::f64::consts::PI;

/// Sobolev smoothness `s > 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothnessParam(f64);

impl SmoothnessParam {
    pub fn new(s: f64) -> Result<Self> {
        if s > 1.0 && s.is_finite() {
            Ok(SmoothnessParam(s))
        } else {
            Err(Error::Domain(format!("smoothness s = {s} must exceed 1")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SmoothnessParam {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<SmoothnessParam> for f64 {
    fn from(s: SmoothnessParam) -> f64 {
        s.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WceRoute {
    Legendre,
    HeatKernel,
    DistanceS32,
}

/// Worst-case error `wce` (the norm, not its square). `value^2 ± tail_bound`
/// brackets the exact `wce^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WceResult {
    pub value: f64,
    pub s: SmoothnessParam,
    pub truncation_l: u64,
    pub tail_bound: f64,
    pub route: WceRoute,
}

impl WceResult {
    pub fn squared(&self) -> f64 {
        self.value * self.value
    }

    /// `[wce^2 - tail, wce^2 + tail]`, clipped below at zero.
    pub fn squared_bracket(&self) -> (f64, f64) {
        let sq = self.squared();
        ((sq - self.tail_bound).max(0.0), sq + self.tail_bound)
    }

    fn from_squared(sq: f64, s: SmoothnessParam, truncation_l: u64, tail_bound: f64, route: WceRoute) -> Self {
        WceResult {
            value: sq.max(0.0).sqrt(),
            s,
            truncation_l,
            tail_bound,
            route,
        }
    }
}

/// Distinct unordered pairs with cosines and `1 - cos` computed from the
/// chordal distance; exactly coincident pairs are counted separately.
#[derive(Debug, Clone)]
pub(crate) struct PairTable {
    pub n: usize,
    pub cos: Vec<f64>,
    pub one_minus: Vec<f64>,
    pub angle: Vec<f64>,
    pub coincident: usize,
}

impl PairTable {
    pub fn new(c: &Configuration) -> Self {
        let pts = c.points();
        let n = pts.len();
        let cap = n * n.saturating_sub(1) / 2;
        let mut table = PairTable {
            n,
            cos: Vec::with_capacity(cap),
            one_minus: Vec::with_capacity(cap),
            angle: Vec::with_capacity(cap),
            coincident: 0,
        };
        for i in 0..n {
            for j in (i + 1)..n {
                let d = pts[i].chordal_distance(&pts[j]);
                if d == 0.0 {
                    table.coincident += 1;
                    continue;
                }
                table.cos.push(pts[i].cosine(&pts[j]));
                table.one_minus.push(0.5 * d * d);
                table.angle.push(pts[i].angle(&pts[j]));
            }
        }
        table
    }

    /// Terms that behave like the diagonal (`P_l = 1` for every `l`), in
    /// ordered-pair units.
    pub fn diagonal_like(&self) -> f64 {
        (self.n + 2 * self.coincident) as f64
    }
}
