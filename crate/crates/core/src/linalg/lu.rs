use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// `P A = L U` with unit lower-triangular `L`, packed in place.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactors {
    /// Gaussian elimination with partial pivoting. A pivot at or below
    /// `n * eps * max|a_ij|` is reported as [`Error::Singular`].
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let threshold = (n as f64) * f64::EPSILON * a.max_abs();

        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold || pmag == 0.0 {
                return Err(Error::Singular {
                    column: k,
                    pivot: pmag,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot_inv = 1.0 / lu[(k, k)];
            let (top, bottom) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n..(k + 1) * n];
            for row in bottom.chunks_exact_mut(n) {
                let factor = row[k] * pivot_inv;
                row[k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= factor * u;
                }
            }
        }
        Ok(LuFactors { lu, perm, swaps })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.dim();
        let mut d = (0..n).map(|i| self.lu[(i, i)]).product::<Complex64>();
        if self.swaps % 2 == 1 {
            d = -d;
        }
        d
    }

    /// Solves `A X = B` for every column of `rhs` at once.
    pub fn solve_matrix(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.dim();
        assert_eq!(rhs.dim(), n, "dimension mismatch");
        let mut x = ComplexMatrix::zeros(n);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(rhs.row(p));
        }
        // Row-oriented substitutions keep every inner loop contiguous.
        for i in 0..n {
            let (done, rest) = x.data.split_at_mut(i * n);
            let row_i = &mut rest[..n];
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (a, &b) in row_i.iter_mut().zip(&done[k * n..(k + 1) * n]) {
                    *a -= l * b;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = x.data.split_at_mut((i + 1) * n);
            let row_i = &mut head[i * n..];
            for k in (i + 1)..n {
                let u = self.lu[(i, k)];
                if u == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row_k = &tail[(k - i - 1) * n..(k - i) * n];
                for (a, &b) in row_i.iter_mut().zip(row_k) {
                    *a -= u * b;
                }
            }
            let inv = 1.0 / self.lu[(i, i)];
            for a in row_i.iter_mut() {
                *a *= inv;
            }
        }
        x
    }
}

/// Returns `M` with `b_mat * M = a_mat`, i.e. `B^{-1} A`.
pub fn solve(b_mat: &ComplexMatrix, a_mat: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b_mat.dim() != a_mat.dim() {
        return Err(Error::invalid("solve: dimension mismatch"));
    }
    Ok(LuFactors::factor(b_mat)?.solve_matrix(a_mat))
}

pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(LuFactors::factor(m)?.determinant())
}
