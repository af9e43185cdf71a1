//! Dense complex linear algebra for the random-matrix sampler.

mod eigen;
mod lu;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub use eigen::eigenvalues;
pub use lu::{determinant, solve, LuFactors};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(ComplexMatrix { n, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// I.i.d. standard complex Gaussian entries: real and imaginary parts are
/// independent with variance 1/2 each.
pub fn gaussian_matrix(n: usize, rng: &RngStream) -> Result<ComplexMatrix> {
    gaussian_matrix_with_variance(n, 0.5, &mut rng.rng())
}

/// Like [`gaussian_matrix`] but with per-component variance `var`, drawing
/// from an already-positioned generator.
pub fn gaussian_matrix_with_variance<R: Rng + ?Sized>(
    n: usize,
    var: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid("matrix dimension must be at least 1"));
    }
    if !(var > 0.0 && var.is_finite()) {
        return Err(Error::invalid("entry variance must be positive"));
    }
    let sd = var.sqrt();
    let data = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sd * re, sd * im)
        })
        .collect();
    Ok(ComplexMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimension_rejected() {
        assert!(gaussian_matrix(0, &RngStream::new(1, 1)).is_err());
    }

    #[test]
    fn fixed_seed_reproducible() {
        let a = gaussian_matrix(2, &RngStream::new(42, 0)).unwrap();
        let b = gaussian_matrix(2, &RngStream::new(42, 0)).unwrap();
        let bits = |m: &ComplexMatrix| {
            m.as_slice()
                .iter()
                .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(bits(&a), bits(&gaussian_matrix(2, &RngStream::new(42, 1)).unwrap()));
    }

    #[test]
    fn scalar_entries_have_standard_moments() {
        let mut rng = RngStream::new(2024, 0).rng();
        let draws = 100_000;
        let (mut sr, mut si, mut sr2, mut si2) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..draws {
            let z = gaussian_matrix_with_variance(1, 0.5, &mut rng).unwrap()[(0, 0)];
            sr += z.re;
            si += z.im;
            sr2 += z.re * z.re;
            si2 += z.im * z.im;
        }
        let m = draws as f64;
        // Each component has sd sqrt(1/2); 3 standard errors.
        let se = (0.5 / m).sqrt();
        assert!((sr / m).abs() < 3.0 * se);
        assert!((si / m).abs() < 3.0 * se);
        let ratio = (sr2 / m - (sr / m).powi(2)) / (si2 / m - (si / m).powi(2));
        assert!((0.97..=1.03).contains(&ratio), "variance ratio {ratio}");
    }
}
