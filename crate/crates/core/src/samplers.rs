//! Point-set generators: the spherical ensemble (random-matrix and
//! sequential determinantal backends) and baseline configurations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{inverse_stereographic, Configuration, PlanarPoint, UnitPoint};
use crate::linalg::{eigenvalues, gaussian_matrix_with_variance, solve};
use crate::rng::RngStream;

/// Fresh `B` draws allowed when the solve reports a singular pivot.
const MAX_REDRAWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    SphericalEig,
    SphericalDpp,
    IidUniform,
    EqualAreaJitter,
    Fibonacci,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 5] = [
        SamplerKind::SphericalEig,
        SamplerKind::SphericalDpp,
        SamplerKind::IidUniform,
        SamplerKind::EqualAreaJitter,
        SamplerKind::Fibonacci,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::SphericalEig => "spherical-eig",
            SamplerKind::SphericalDpp => "spherical-dpp",
            SamplerKind::IidUniform => "iid-uniform",
            SamplerKind::EqualAreaJitter => "equal-area-jitter",
            SamplerKind::Fibonacci => "fibonacci",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown sampler kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub n: usize,
    pub rng: RngStream,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, n: usize, rng: RngStream) -> Result<Self> {
        check_n(n)?;
        Ok(SamplerSpec { kind, n, rng })
    }

    pub fn sample(&self) -> Result<Configuration> {
        match self.kind {
            SamplerKind::SphericalEig => sample_spherical_eig(self.n, &self.rng),
            SamplerKind::SphericalDpp => sample_spherical_dpp(self.n, &self.rng),
            SamplerKind::IidUniform => sample_iid_uniform(self.n, &self.rng),
            SamplerKind::EqualAreaJitter => sample_equal_area_jitter(self.n, &self.rng),
            SamplerKind::Fibonacci => sample_fibonacci(self.n),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("point count must be at least 1"))
    } else {
        Ok(())
    }
}

/// Spherical ensemble: eigenvalues of `B^{-1} A` for independent complex
/// Gaussian `A`, `B`, sent to the sphere by inverse stereographic projection
/// (no rescaling; the unscaled spectrum has planar density `∝ (1+|z|²)^{-2}`).
pub fn sample_spherical_eig(n: usize, rng: &RngStream) -> Result<Configuration> {
    sample_spherical_eig_with_variance(n, 0.5, rng)
}

/// As [`sample_spherical_eig`] with per-component entry variance `var`;
/// the law does not depend on it.
pub fn sample_spherical_eig_with_variance(n: usize, var: f64, rng: &RngStream) -> Result<Configuration> {
    check_n(n)?;
    let mut r = rng.rng();
    let a = gaussian_matrix_with_variance(n, var, &mut r)?;
    let mut last = None;
    for _ in 0..MAX_REDRAWS {
        let b = gaussian_matrix_with_variance(n, var, &mut r)?;
        match solve(&b, &a) {
            Ok(m) => {
                let pts = eigenvalues(&m)?
                    .into_iter()
                    .map(|z| inverse_stereographic(PlanarPoint::from(z)))
                    .collect();
                return Configuration::new(pts);
            }
            Err(e @ Error::Singular { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Spherical ensemble by sequential sampling of the projection process.
///
/// In height/azimuth coordinates the kernel's orthonormal functions (with
/// respect to the uniform probability measure) are
/// `φ_k = sqrt(N C(N-1,k)) ((1+z)/2)^{k/2} ((1-z)/2)^{(N-1-k)/2} e^{ikφ}`,
/// `k = 0..N-1`. Each step proposes uniform points and accepts with
/// probability `|P⊥ v(x)|² / N`, where `P⊥` removes the span of the
/// feature vectors already chosen.
#[cfg(feature = "dpp")]
pub fn sample_spherical_dpp(n: usize, rng: &RngStream) -> Result<Configuration> {
    use num_complex::Complex64;
    use statrs::function::gamma::ln_gamma;

    check_n(n)?;
    let mut r = rng.rng();
    let nf = n as f64;
    let log_norm: Vec<f64> = (0..n)
        .map(|k| 0.5 * (nf.ln() + ln_gamma(nf) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64)))
        .collect();
    let features = |p: &UnitPoint| -> Vec<Complex64> {
        let up = (0.5 * (1.0 + p.z())).max(0.0).ln();
        let down = (0.5 * (1.0 - p.z())).max(0.0).ln();
        let phi = p.y().atan2(p.x());
        (0..n)
            .map(|k| {
                let kf = k as f64;
                let mut lm = log_norm[k];
                if k > 0 {
                    lm += 0.5 * kf * up;
                }
                if k + 1 < n {
                    lm += 0.5 * (nf - 1.0 - kf) * down;
                }
                Complex64::from_polar(lm.exp(), kf * phi)
            })
            .collect()
    };

    let max_proposals = 10_000 * n;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for step in 0..n {
        let mut accepted = None;
        for _ in 0..max_proposals {
            let x = UnitPoint::random(&mut r);
            let mut v = features(&x);
            project_out(&basis, &mut v);
            project_out(&basis, &mut v);
            let resid: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if r.gen::<f64>() * nf < resid {
                let norm = resid.sqrt();
                v.iter_mut().for_each(|c| *c /= norm);
                accepted = Some((x, v));
                break;
            }
        }
        let Some((x, v)) = accepted else {
            return Err(Error::SamplerStall(format!(
                "no acceptance in {max_proposals} proposals at step {step} of {n}"
            )));
        };
        points.push(x);
        basis.push(v);
    }
    Configuration::new(points)
}

#[cfg(feature = "dpp")]
fn project_out(basis: &[Vec<num_complex::Complex64>], v: &mut [num_complex::Complex64]) {
    for e in basis {
        let c: num_complex::Complex64 = e.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        for (vi, ei) in v.iter_mut().zip(e) {
            *vi -= c * ei;
        }
    }
}

#[cfg(not(feature = "dpp"))]
pub fn sample_spherical_dpp(_n: usize, _rng: &RngStream) -> Result<Configuration> {
    Err(Error::invalid("the spherical-dpp backend was not compiled in (feature \"dpp\")"))
}

/// `n` independent uniform points (height uniform on `[-1, 1]`, azimuth uniform).
pub fn sample_iid_uniform(n: usize, rng: &RngStream) -> Result<Configuration> {
    check_n(n)?;
    let mut r = rng.rng();
    let pts = (0..n)
        .map(|_| {
            let z: f64 = r.gen_range(-1.0..=1.0);
            let phi: f64 = r.gen_range(0.0..2.0 * PI);
            UnitPoint::from_height(z, phi)
        })
        .collect();
    Configuration::new(pts)
}

/// One zone of a zonal partition: heights `[z_low, z_high]` cut into
/// `cells` equal azimuthal sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub z_low: f64,
    pub z_high: f64,
    pub cells: usize,
}

impl Zone {
    pub fn cell_area(&self) -> f64 {
        2.0 * PI * (self.z_high - self.z_low) / self.cells as f64
    }
}

/// Zonal partition of the sphere into `n` cells of area `4π/n`: two polar
/// caps and collars whose cell counts follow the ideal collar areas, with
/// rounding carried from collar to collar.
pub fn equal_area_partition(n: usize) -> Result<Vec<Zone>> {
    check_n(n)?;
    if n == 1 {
        return Ok(vec![Zone { z_low: -1.0, z_high: 1.0, cells: 1 }]);
    }
    let nf = n as f64;
    let cap_theta = (1.0 - 2.0 / nf).clamp(-1.0, 1.0).acos();
    let mut counts = vec![1usize];
    if n > 2 {
        let ideal_angle = (4.0 * PI / nf).sqrt();
        let collars = (((PI - 2.0 * cap_theta) / ideal_angle).round() as usize).max(1);
        let fitting = (PI - 2.0 * cap_theta) / collars as f64;
        let mut carry = 0.0;
        for i in 0..collars {
            let t0 = cap_theta + i as f64 * fitting;
            let t1 = t0 + fitting;
            let ideal = (t0.cos() - t1.cos()) / 2.0 * nf;
            let m = (ideal + carry).round();
            carry += ideal - m;
            if m >= 1.0 {
                counts.push(m as usize);
            }
        }
    }
    counts.push(1);
    let total: usize = counts.iter().sum();
    if total != n {
        // Rounding drift can only come from the collars; fold it into the widest.
        let widest = (1..counts.len() - 1).max_by_key(|&i| counts[i]).unwrap_or(0);
        counts[widest] = (counts[widest] as isize + n as isize - total as isize) as usize;
    }
    let mut zones = Vec::with_capacity(counts.len());
    let mut above = 0usize;
    for &k in &counts {
        let z_high = 1.0 - 2.0 * above as f64 / nf;
        above += k;
        let z_low = if above == n { -1.0 } else { 1.0 - 2.0 * above as f64 / nf };
        zones.push(Zone { z_low, z_high, cells: k });
    }
    Ok(zones)
}

/// One uniform point in each cell of [`equal_area_partition`].
pub fn sample_equal_area_jitter(n: usize, rng: &RngStream) -> Result<Configuration> {
    let zones = equal_area_partition(n)?;
    let mut r = rng.rng();
    let mut pts = Vec::with_capacity(n);
    for zone in &zones {
        let width = 2.0 * PI / zone.cells as f64;
        for k in 0..zone.cells {
            let z = r.gen_range(zone.z_low..=zone.z_high);
            let phi = (k as f64 + r.gen::<f64>()) * width;
            pts.push(UnitPoint::from_height(z, phi));
        }
    }
    Configuration::new(pts)
}

/// Fibonacci spiral: heights `1 - (2i+1)/n`, azimuths in golden-angle steps.
pub fn sample_fibonacci(n: usize) -> Result<Configuration> {
    check_n(n)?;
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let pts = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            UnitPoint::from_height(z, (i as f64 * golden_angle) % (2.0 * PI))
        })
        .collect();
    Configuration::new(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ks_one_sample;

    #[test]
    fn kinds_round_trip_through_strings() {
        for k in SamplerKind::ALL {
            assert_eq!(k.name().parse::<SamplerKind>().unwrap(), k);
        }
        assert!("gaussian".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn zero_points_rejected() {
        for k in SamplerKind::ALL {
            assert!(SamplerSpec::new(k, 0, RngStream::new(0, 0)).is_err());
        }
    }

    #[test]
    fn partition_cells_have_equal_area() {
        for n in 1..=500 {
            let zones = equal_area_partition(n).unwrap();
            assert_eq!(zones.iter().map(|z| z.cells).sum::<usize>(), n);
            assert_eq!(zones.first().unwrap().z_high, 1.0);
            assert_eq!(zones.last().unwrap().z_low, -1.0);
            for z in &zones {
                assert!((z.cell_area() - 4.0 * PI / n as f64).abs() < 1e-9, "n {n}: {z:?}");
            }
        }
    }

    #[test]
    fn jittered_points_land_in_their_cells() {
        let n = 97;
        let c = sample_equal_area_jitter(n, &RngStream::new(3, 0)).unwrap();
        let zones = equal_area_partition(n).unwrap();
        let mut it = c.iter();
        for zone in &zones {
            for _ in 0..zone.cells {
                let p = it.next().unwrap();
                assert!(p.z() >= zone.z_low - 1e-12 && p.z() <= zone.z_high + 1e-12);
            }
        }
    }

    #[test]
    fn fibonacci_is_deterministic() {
        assert_eq!(sample_fibonacci(50).unwrap(), sample_fibonacci(50).unwrap());
        assert_eq!(sample_fibonacci(1).unwrap().len(), 1);
    }

    #[test]
    fn single_eigenvalue_is_uniform() {
        let zs: Vec<f64> = (0..20_000)
            .map(|i| sample_spherical_eig(1, &RngStream::new(17, i)).unwrap().points()[0].z())
            .collect();
        assert!(ks_one_sample(&zs, |z| ((z + 1.0) / 2.0).clamp(0.0, 1.0)).passes(0.01));
    }

    #[test]
    fn eig_sampler_is_reproducible() {
        let a = sample_spherical_eig(20, &RngStream::new(5, 5)).unwrap();
        let b = sample_spherical_eig(20, &RngStream::new(5, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[cfg(feature = "dpp")]
    #[test]
    fn dpp_single_point_is_uniform_and_reproducible() {
        let zs: Vec<f64> = (0..20_000)
            .map(|i| sample_spherical_dpp(1, &RngStream::new(19, i)).unwrap().points()[0].z())
            .collect();
        assert!(ks_one_sample(&zs, |z| ((z + 1.0) / 2.0).clamp(0.0, 1.0)).passes(0.01));
        let a = sample_spherical_dpp(12, &RngStream::new(2, 2)).unwrap();
        assert_eq!(a, sample_spherical_dpp(12, &RngStream::new(2, 2)).unwrap());
    }
}
