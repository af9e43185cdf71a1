//! Eigenvalues of a general complex matrix.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, then single-shift implicit QR with Wilkinson shifts and deflation
//! on the active window only (no Schur vectors are formed).

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// All `n` eigenvalues of `m`, with multiplicity, in no particular order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("eigenvalues: matrix has non-finite entries"));
    }
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        _ => {}
    }
    let mut h = m.clone();
    balance(&mut h);
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// `|re| + |im|`, the cheap modulus LAPACK uses for tests and pivoting.
#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity by powers of two so that row and column norms are
/// comparable (EISPACK `balanc`, scaling step only).
fn balance(h: &mut ComplexMatrix) {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = RADIX * RADIX;
    let n = h.dim();
    let mut converged = false;
    let mut rounds = 0;
    while !converged && rounds < 100 {
        converged = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(h[(j, i)]);
                    r += cabs1(h[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX2;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX2;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for z in h.row_mut(i) {
                    *z *= inv;
                }
                for j in 0..n {
                    h[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction; entries below the subdiagonal are zeroed.
fn reduce_to_hessenberg(h: &mut ComplexMatrix) {
    let n = h.dim();
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut alpha2 = 0.0;
        for i in 0..len {
            alpha2 += h[(k + 1 + i, k)].norm_sqr();
        }
        let tail2 = alpha2 - h[(k + 1, k)].norm_sqr();
        if tail2 <= f64::MIN_POSITIVE {
            continue;
        }
        let alpha = alpha2.sqrt();
        let x0 = h[(k + 1, k)];
        let x0_abs = x0.norm();
        let phase = if x0_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0_abs
        };
        let beta = -phase * alpha;
        for i in 0..len {
            v[i] = h[(k + 1 + i, k)];
        }
        v[0] -= beta;
        // P = I - tau v v^*, with |v|^2 = 2 alpha (alpha + |x0|).
        let tau = 1.0 / (alpha * (alpha + x0_abs));

        // Left: rows k+1.., columns k+1.. (column k is set explicitly below).
        let wl = &mut w[..n - k - 1];
        wl.iter_mut().for_each(|x| *x = ZERO);
        for i in 0..len {
            let vc = v[i].conj();
            let row = &h.row(k + 1 + i)[k + 1..];
            for (acc, &x) in wl.iter_mut().zip(row) {
                *acc += vc * x;
            }
        }
        for i in 0..len {
            let scale = v[i] * tau;
            let row = &mut h.row_mut(k + 1 + i)[k + 1..];
            for (x, &acc) in row.iter_mut().zip(wl.iter()) {
                *x -= scale * acc;
            }
        }
        h[(k + 1, k)] = beta;
        for i in 1..len {
            h[(k + 1 + i, k)] = ZERO;
        }

        // Right: every row, columns k+1..
        for r in 0..n {
            let row = &mut h.row_mut(r)[k + 1..];
            let mut s = ZERO;
            for (&x, &vi) in row.iter().zip(&v[..len]) {
                s += x * vi;
            }
            let s = s * tau;
            for (x, &vi) in row.iter_mut().zip(&v[..len]) {
                *x -= s * vi.conj();
            }
        }
    }
}

/// Complex Givens rotation `G = [c, s; -conj(s), c]` with `G [f; g] = [r; 0]`.
#[inline]
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, ZERO, f);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga, Complex64::new(ga, 0.0));
    }
    let rho = fa.hypot(ga);
    let phase = f / fa;
    let c = fa / rho;
    let s = phase * g.conj() / rho;
    (c, s, phase * rho)
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let t = (a - d) * 0.5;
    let bc = b * c;
    if bc == ZERO {
        return d;
    }
    let disc = (t * t + bc).sqrt();
    let p = t + disc;
    let q = t - disc;
    let den = if p.norm() >= q.norm() { p } else { q };
    if den == ZERO {
        d
    } else {
        d - bc / den
    }
}

fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let max_sweeps = 30 * n.max(10);
    let mut sweeps = 0usize;
    let mut eig = vec![ZERO; n];

    let mut i = n as isize - 1;
    let mut its_here = 0usize;
    while i >= 0 {
        let iu = i as usize;
        // Locate the bottom-most negligible subdiagonal within [0, i].
        let mut l = iu;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            if sub <= smlnum {
                break;
            }
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[(l - 1, l - 2)].norm();
                }
                if l < iu {
                    tst += h[(l + 1, l)].norm();
                }
            }
            if sub <= ulp * tst {
                break;
            }
            l -= 1;
        }
        if l > 0 {
            h[(l, l - 1)] = ZERO;
        }
        if l == iu {
            eig[iu] = h[(iu, iu)];
            i -= 1;
            its_here = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence {
                iterations: sweeps - 1,
                unconverged: iu + 1,
                subdiagonal: h[(iu, iu - 1)].norm(),
            });
        }
        its_here += 1;

        let shift = if its_here % 30 == 10 {
            let s = h[(l + 1, l)].re.abs() * 0.75;
            h[(l, l)] + Complex64::new(s, 0.0)
        } else if its_here % 30 == 20 {
            let s = h[(iu, iu - 1)].re.abs() * 0.75;
            h[(iu, iu)] + Complex64::new(s, 0.0)
        } else {
            wilkinson_shift(
                h[(iu - 1, iu - 1)],
                h[(iu - 1, iu)],
                h[(iu, iu - 1)],
                h[(iu, iu)],
            )
        };

        qr_sweep(h, l, iu, shift);
    }
    Ok(eig)
}

/// One implicit single-shift QR sweep on the window `[lo, hi]`.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.dim();
    for k in lo..hi {
        let (x, y) = if k == lo {
            (h[(lo, lo)] - shift, h[(lo + 1, lo)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s, r) = givens(x, y);
        if k > lo {
            h[(k, k - 1)] = r;
            h[(k + 1, k - 1)] = ZERO;
        }
        let sc = s.conj();
        // Rows k, k+1 over columns k..=hi.
        {
            let (top, bottom) = h.data.split_at_mut((k + 1) * n);
            let rk = &mut top[k * n + k..k * n + hi + 1];
            let rk1 = &mut bottom[k..hi + 1];
            for (a, b) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (va, vb) = (*a, *b);
                *a = va * c + s * vb;
                *b = vb * c - sc * va;
            }
        }
        // Columns k, k+1 over rows lo..=min(k+2, hi).
        let last = (k + 2).min(hi);
        for r in lo..=last {
            let base = r * n;
            let a = h.data[base + k];
            let b = h.data[base + k + 1];
            h.data[base + k] = a * c + b * sc;
            h.data[base + k + 1] = b * c - a * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{determinant, gaussian_matrix};
    use crate::rng::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Greedy nearest matching; fine for well-separated spectra.
    fn max_matching_error(mut got: Vec<Complex64>, want: &[Complex64]) -> f64 {
        let mut worst: f64 = 0.0;
        for w in want {
            let (idx, d) = got
                .iter()
                .enumerate()
                .map(|(i, g)| (i, (g - w).norm()))
                .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
            worst = worst.max(d);
            got.swap_remove(idx);
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(1.0, 0.0), c(2.0, 1.0), c(-3.0, 0.0)];
        let e = eigenvalues(&ComplexMatrix::from_diagonal(&d)).unwrap();
        assert!(max_matching_error(e, &d) < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let m = ComplexMatrix::from_row_major(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e = eigenvalues(&m).unwrap();
        assert!(max_matching_error(e, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
    }

    #[test]
    fn upper_triangular_and_jordan_like() {
        let m = ComplexMatrix::from_row_major(
            3,
            vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let e = eigenvalues(&m).unwrap();
        assert_eq!(e.len(), 3);
        // Defective eigenvalue: accuracy ~ eps^{1/3}.
        assert!(e.iter().all(|z| (z - c(2.0, 0.0)).norm() < 1e-4));
    }

    #[test]
    fn zero_and_badly_scaled_matrices() {
        let e = eigenvalues(&ComplexMatrix::zeros(4)).unwrap();
        assert!(e.iter().all(|z| *z == ZERO));
        let mut m = ComplexMatrix::from_diagonal(&[c(1e-8, 0.0), c(1.0, 0.0), c(1e8, 0.0)]);
        m[(0, 2)] = c(1e12, 0.0);
        m[(2, 0)] = c(1e-12, 0.0);
        let e = eigenvalues(&m).unwrap();
        let tr = m.trace();
        let s: Complex64 = e.iter().sum();
        assert!((s - tr).norm() <= 1e-8 * 3.0 * m.max_abs());
    }

    #[test]
    fn trace_and_determinant_identities() {
        for seed in 0..10 {
            let m = gaussian_matrix(40, &RngStream::new(seed, 7)).unwrap();
            let e = eigenvalues(&m).unwrap();
            let s: Complex64 = e.iter().sum();
            assert!((s - m.trace()).norm() <= 1e-8 * 40.0 * m.max_abs());
            let p: Complex64 = e.iter().product();
            let d = determinant(&m).unwrap();
            assert!((p - d).norm() <= 1e-6 * d.norm());
        }
    }
}
