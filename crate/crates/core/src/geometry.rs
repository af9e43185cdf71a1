//! Points, configurations and rigid motions of the unit two-sphere.
//!
//! Stereographic convention: the plane origin maps to the south pole
//! `(0, 0, -1)` and the point at infinity to the north pole `(0, 0, 1)`.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Accepted deviation of `|p|` from one when reading points from outside.
const INPUT_NORM_TOL: f64 = 1e-6;

/// A point on the unit sphere in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitPoint {
    pub const NORTH: UnitPoint = UnitPoint { x: 0.0, y: 0.0, z: 1.0 };
    pub const SOUTH: UnitPoint = UnitPoint { x: 0.0, y: 0.0, z: -1.0 };

    /// Normalizes `(x, y, z)` onto the sphere. Fails for zero or non-finite input.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid(format!(
                "cannot normalize ({x}, {y}, {z}) onto the sphere"
            )));
        }
        Ok(Self::renorm(x / norm, y / norm, z / norm))
    }

    /// Point with colatitude `theta` (from the north pole) and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::renorm(st * cp, st * sp, ct)
    }

    /// Point with height `z` in `[-1, 1]` and azimuth `phi`.
    pub fn from_height(z: f64, phi: f64) -> Self {
        let z = z.clamp(-1.0, 1.0);
        let r = (1.0 - z * z).max(0.0).sqrt();
        let (sp, cp) = phi.sin_cos();
        Self::renorm(r * cp, r * sp, z)
    }

    /// Uniformly distributed point (normalized Gaussian triple).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            if let Ok(p) = Self::normalized(x, y, z) {
                return p;
            }
        }
    }

    // One Newton step on the norm keeps |p| = 1 to a couple of ulps.
    fn renorm(x: f64, y: f64, z: f64) -> Self {
        let n2 = x * x + y * y + z * z;
        let k = 1.5 - 0.5 * n2;
        UnitPoint {
            x: x * k,
            y: y * k,
            z: z * k,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Inner product, clamped to `[-1, 1]`.
    pub fn cosine(&self, other: &UnitPoint) -> f64 {
        (self.x * other.x + self.y * other.y + self.z * other.z).clamp(-1.0, 1.0)
    }

    /// Euclidean (chordal) distance in `R^3`.
    pub fn chordal_distance(&self, other: &UnitPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Geodesic angle, accurate also for nearly coincident or antipodal pairs.
    pub fn angle(&self, other: &UnitPoint) -> f64 {
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        let dot = self.x * other.x + self.y * other.y + self.z * other.z;
        cross.atan2(dot)
    }
}

/// A finite point `re + i im` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint {
    pub re: f64,
    pub im: f64,
}

impl PlanarPoint {
    pub fn new(re: f64, im: f64) -> Self {
        PlanarPoint { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<num_complex::Complex64> for PlanarPoint {
    fn from(z: num_complex::Complex64) -> Self {
        PlanarPoint::new(z.re, z.im)
    }
}

/// Maps a plane point to the sphere: `(2 re, 2 im, |z|^2 - 1) / (1 + |z|^2)`.
///
/// Non-finite input is treated as the point at infinity (the north pole).
pub fn inverse_stereographic(z: PlanarPoint) -> UnitPoint {
    if !z.is_finite() {
        return UnitPoint::NORTH;
    }
    let r = z.re.hypot(z.im);
    if r <= 1.0 {
        let r2 = r * r;
        let d = 1.0 + r2;
        UnitPoint::renorm(2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d)
    } else {
        // Work with rho = 1/|z| so huge eigenvalues do not overflow |z|^2.
        let rho = 1.0 / r;
        let (u, v) = (z.re / r, z.im / r);
        let rho2 = rho * rho;
        let d = 1.0 + rho2;
        UnitPoint::renorm(2.0 * u * rho / d, 2.0 * v * rho / d, (1.0 - rho2) / d)
    }
}

/// Projects from the north pole onto the plane; `None` is the point at infinity.
pub fn stereographic(p: UnitPoint) -> Option<PlanarPoint> {
    if p.z >= 1.0 || (p.x == 0.0 && p.y == 0.0 && p.z > 0.0) {
        return None;
    }
    if p.z <= 0.0 {
        let d = 1.0 - p.z;
        Some(PlanarPoint::new(p.x / d, p.y / d))
    } else {
        // x / (1 - z) = x (1 + z) / (x^2 + y^2), free of cancellation near the pole.
        let rho2 = p.x * p.x + p.y * p.y;
        let k = (1.0 + p.z) / rho2;
        Some(PlanarPoint::new(p.x * k, p.y * k))
    }
}

/// An ordered list of `N >= 1` points on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<UnitPoint>,
}

impl Configuration {
    pub fn new(points: Vec<UnitPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a configuration needs at least one point"));
        }
        Ok(Configuration { points })
    }

    /// Builds a configuration from raw triples, renormalizing each one.
    /// Triples further than `1e-6` from the unit sphere are rejected.
    pub fn from_triples(triples: &[[f64; 3]]) -> Result<Self> {
        let points = triples
            .iter()
            .enumerate()
            .map(|(i, t)| checked_point(t, i + 1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitPoint> {
        self.points.iter()
    }

    pub fn triples(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(UnitPoint::coords).collect()
    }

    /// CSV with header `x,y,z`, one point per line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["x", "y", "z"])?;
        for p in &self.points {
            wtr.write_record(&[
                format!("{:e}", p.x),
                format!("{:e}", p.y),
                format!("{:e}", p.z),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 3 || &headers[0] != "x" || &headers[1] != "y" || &headers[2] != "z" {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header x,y,z, found {:?}", headers),
            });
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let mut t = [0.0; 3];
            for (k, field) in rec.iter().enumerate() {
                t[k] = field.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("field {}: {e}", k + 1),
                })?;
            }
            points.push(checked_point(&t, line)?);
        }
        Self::new(points)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn checked_point(t: &[f64; 3], line: usize) -> Result<UnitPoint> {
    let norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::Parse {
            line,
            message: format!("point {:?} is not on the unit sphere (|p| = {norm})", t),
        });
    }
    UnitPoint::normalized(t[0], t[1], t[2])
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.triples().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let triples = Vec::<[f64; 3]>::deserialize(d)?;
        Configuration::from_triples(&triples).map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a Configuration {
    type Item = &'a UnitPoint;
    type IntoIter = std::slice::Iter<'a, UnitPoint>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// A proper rotation of `R^3`, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Accepts `m` if `m^T m = I` and `det m = 1` within `1e-10`.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let mut dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - target).abs());
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        dev = dev.max((det - 1.0).abs());
        if !dev.is_finite() || dev > 1e-10 {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        Ok(Rotation { m })
    }

    /// Right-handed rotation by `angle` about `axis`.
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::invalid("rotation axis must be a nonzero finite vector"));
        }
        let q = [
            (angle / 2.0).cos(),
            axis[0] / n * (angle / 2.0).sin(),
            axis[1] / n * (angle / 2.0).sin(),
            axis[2] / n * (angle / 2.0).sin(),
        ];
        Ok(Self::from_unit_quaternion(q))
    }

    /// Haar-distributed rotation (uniform unit quaternion).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                return Self::from_unit_quaternion([q[0] / n, q[1] / n, q[2] / n, q[3] / n]);
            }
        }
    }

    fn from_unit_quaternion([w, x, y, z]: [f64; 4]) -> Self {
        Rotation {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, p: &UnitPoint) -> UnitPoint {
        let v = p.coords();
        let r = |i: usize| self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        UnitPoint::renorm(r(0), r(1), r(2))
    }
}

pub fn apply_rotation(c: &Configuration, r: &Rotation) -> Configuration {
    Configuration {
        points: c.points.iter().map(|p| r.apply(p)).collect(),
    }
}

/// Symmetric matrix of clamped inner products `<x_i, x_j>`, unit diagonal.
#[derive(Debug, Clone)]
pub struct PairCosines {
    n: usize,
    data: Vec<f64>,
}

impl PairCosines {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Strict upper triangle in row order.
    pub fn upper_pairs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| self.row(i)[i + 1..].iter().copied())
    }
}

pub fn pairwise_cosines(c: &Configuration) -> PairCosines {
    let n = c.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = c.points[i].cosine(&c.points[j]);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    PairCosines { n, data }
}
