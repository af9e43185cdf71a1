//! Small statistics toolkit for the Monte-Carlo checks.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len();
    if n == 0 {
        return MeanSe { mean: f64::NAN, se: f64::NAN, n };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let se = if n > 1 { (variance(xs) / n as f64).sqrt() } else { 0.0 };
    MeanSe { mean, se, n }
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Standard error of the unbiased sample variance, from the fourth central moment.
pub fn variance_se(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    ((m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n).max(0.0).sqrt()
}

/// Linear-interpolated quantile (type 7) of unsorted data.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Asymptotic Kolmogorov survival function with the usual finite-sample
/// correction on the argument.
fn kolmogorov_q(n_eff: f64, d: f64) -> f64 {
    let sq = n_eff.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

impl TestOutcome {
    pub fn passes(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> TestOutcome {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    TestOutcome { statistic: d, p_value: kolmogorov_q(n, d) }
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestOutcome {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    TestOutcome { statistic: d, p_value: kolmogorov_q(n * m / (n + m), d) }
}

/// Pearson chi-square goodness of fit.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<TestOutcome> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::invalid("chi-square needs matching category lists of length >= 2"));
    }
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(TestOutcome { statistic: stat, p_value: 1.0 - dist.cdf(stat) })
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `log(median(group))` on `log(x)` with a percentile bootstrap
/// interval (groups resampled independently).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub resamples: usize,
}

pub fn log_median_slope(xs: &[f64], groups: &[Vec<f64>], resamples: usize, level: f64, rng: &RngStream) -> Result<SlopeFit> {
    if xs.len() != groups.len() || xs.len() < 3 {
        return Err(Error::invalid("slope fit needs at least three groups"));
    }
    if groups.iter().any(|g| g.is_empty() || g.iter().any(|v| !(*v > 0.0))) {
        return Err(Error::invalid("slope fit needs nonempty groups of positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    if lx.iter().all(|v| (v - lx[0]).abs() < 1e-12) {
        return Err(Error::invalid("slope fit needs distinct abscissae"));
    }
    let fit = |meds: &[f64]| ols_slope(&lx, &meds.iter().map(|m| m.ln()).collect::<Vec<_>>());
    let slope = fit(&groups.iter().map(|g| median(g)).collect::<Vec<_>>());
    let mut r = rng.rng();
    let mut boots = Vec::with_capacity(resamples);
    let mut buf = Vec::new();
    for _ in 0..resamples {
        let meds: Vec<f64> = groups
            .iter()
            .map(|g| {
                buf.clear();
                buf.extend((0..g.len()).map(|_| g[r.gen_range(0..g.len())]));
                median(&buf)
            })
            .collect();
        boots.push(fit(&meds));
    }
    boots.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(SlopeFit {
        slope,
        ci_low: quantile_sorted(&boots, alpha),
        ci_high: quantile_sorted(&boots, 1.0 - alpha),
        resamples,
    })
}

/// Standard normal quantile for one-sided confidence statements.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::Normal;
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_column_has_zero_se() {
        let m = mean_se(&[2.5; 40]);
        assert_eq!(m.mean, 2.5);
        assert_eq!(m.se, 0.0);
    }

    #[test]
    fn quantile_matches_sort() {
        let xs: Vec<f64> = (0..200).map(|i| ((i * 37) % 200) as f64).collect();
        assert_eq!(quantile(&xs, 0.5), 99.5);
        assert_eq!(quantile(&xs, 0.0), 0.0);
        assert_eq!(quantile(&xs, 1.0), 199.0);
        assert!((quantile(&xs, 0.9) - 179.1).abs() < 1e-12);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shift() {
        let mut r = RngStream::new(1, 0).rng();
        let xs: Vec<f64> = (0..5000).map(|_| r.gen::<f64>()).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).passes(0.01));
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(!ks_one_sample(&shifted, |x| x.clamp(0.0, 1.0)).passes(0.01));
        let ys: Vec<f64> = (0..4000).map(|_| r.gen::<f64>()).collect();
        assert!(ks_two_sample(&xs, &ys).passes(0.01));
        assert!(!ks_two_sample(&shifted, &ys).passes(0.01));
    }

    #[test]
    fn chi_square_reference() {
        let t = chi_square_gof(&[10, 10, 10, 10], &[10.0; 4]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        // 7.815 is the 95% point with 3 degrees of freedom.
        let t = chi_square_gof(&[0, 0, 20, 20], &[10.0; 4]).unwrap();
        assert!(t.p_value < 0.05);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [10.0, 20.0, 40.0, 80.0];
        let groups: Vec<Vec<f64>> = xs.iter().map(|x: &f64| vec![x.powf(-0.75); 5]).collect();
        let fit = log_median_slope(&xs, &groups, 100, 0.95, &RngStream::new(1, 1)).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!(log_median_slope(&xs[..2], &groups[..2], 10, 0.95, &RngStream::new(1, 1)).is_err());
    }
}
