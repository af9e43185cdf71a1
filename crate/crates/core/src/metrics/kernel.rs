//! The `O(pairs · L)` Legendre pair sum shared by the spectral routes.

use rayon::prelude::*;

const LANES: usize = 8;
/// Pairs per task. Fixed so the reduction tree, and therefore every bit of
/// the result, does not depend on the thread count.
const CHUNK: usize = 512;

/// `Σ_pairs Σ_{l=1}^{L} weights[l] P_l(t)` with `L = weights.len() - 1`
/// (`weights[0]` is ignored).
pub fn legendre_pair_sum(ts: &[f64], weights: &[f64]) -> f64 {
    let l_max = weights.len().saturating_sub(1);
    if l_max == 0 || ts.is_empty() {
        return 0.0;
    }
    // P_{l+1} = a_l t P_l - b_l P_{l-1}
    let a: Vec<f64> = (0..l_max).map(|l| (2 * l + 1) as f64 / (l + 1) as f64).collect();
    let b: Vec<f64> = (0..l_max).map(|l| l as f64 / (l + 1) as f64).collect();
    let rec = Recurrence { a: &a, b: &b, w: weights };
    let partials: Vec<f64> = if ts.len() >= 4 * CHUNK {
        ts.par_chunks(CHUNK).map(|c| rec.chunk_sum(c)).collect()
    } else {
        ts.chunks(CHUNK).map(|c| rec.chunk_sum(c)).collect()
    };
    partials.iter().sum()
}

struct Recurrence<'a> {
    a: &'a [f64],
    b: &'a [f64],
    w: &'a [f64],
}

impl Recurrence<'_> {
    fn chunk_sum(&self, ts: &[f64]) -> f64 {
        let mut blocks = ts.chunks_exact(LANES);
        let mut total = 0.0;
        for block in &mut blocks {
            let t: [f64; LANES] = block.try_into().unwrap();
            total += self.block(&t).iter().sum::<f64>();
        }
        for &t in blocks.remainder() {
            total += self.block(&[t])[0];
        }
        total
    }

    #[inline(always)]
    fn block<const K: usize>(&self, t: &[f64; K]) -> [f64; K] {
        let l_max = self.w.len() - 1;
        let mut p0 = [1.0; K];
        let mut p1 = *t;
        let mut acc = [0.0; K];
        for k in 0..K {
            acc[k] = self.w[1] * t[k];
        }
        for l in 1..l_max {
            let (al, bl, wl) = (self.a[l], self.b[l], self.w[l + 1]);
            for k in 0..K {
                let p2 = al * t[k] * p1[k] - bl * p0[k];
                p0[k] = p1[k];
                p1[k] = p2;
                acc[k] += wl * p2;
            }
        }
        acc
    }
}
