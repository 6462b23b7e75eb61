//! Descriptive statistics, weighted regression and distribution distances.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float as _;

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return f64::NAN;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Standard error of the mean.
pub fn standard_error(x: &[f64]) -> f64 {
    (sample_variance(x) / x.len() as f64).sqrt()
}

/// Normal-theory standard error of a sample variance: `s² √(2/(T−1))`.
pub fn variance_standard_error(var: f64, trials: usize) -> f64 {
    var * (2.0 / (trials as f64 - 1.0)).sqrt()
}

/// Summary of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
}

impl Summary {
    pub fn of(x: &[f64]) -> Self {
        let variance = sample_variance(x).max(0.0);
        Summary {
            count: x.len(),
            mean: mean(x),
            mean_se: (variance / x.len() as f64).sqrt(),
            variance,
            variance_se: variance_standard_error(variance, x.len()),
        }
    }
}

/// Weighted least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

impl LinearFit {
    /// Half-width of the 95% normal confidence band on the slope.
    pub fn slope_band(&self) -> f64 {
        1.96 * self.slope_se
    }
}

/// Weighted least squares with weights `w_i = 1/σ_i²`; standard errors are
/// the model-based ones `(XᵀWX)⁻¹`.
pub fn weighted_least_squares(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    if x.len() < 2 || x.len() != y.len() || x.len() != w.len() {
        return None;
    }
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if !(det > 0.0) {
        return None;
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    Some(LinearFit {
        slope,
        intercept,
        slope_se: (sw / det).sqrt(),
        intercept_se: (sxx / det).sqrt(),
    })
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|a, b| x[*a].total_cmp(&x[*b]));
    let mut r = alloc::vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and
/// `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&x), 2.5);
        assert!((sample_variance(&x) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exact_line_is_recovered() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 3.0 * v).collect();
        let f = weighted_least_squares(&x, &y, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((f.slope + 3.0).abs() < 1e-12);
        assert!((f.intercept - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_monotone() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [10.0, 8.0, 7.5, 1.0, -3.0];
        assert!((spearman(&x, &y) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_against_uniform() {
        let s: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!(ks_distance(&s, |x| x.clamp(0.0, 1.0)) <= 0.005 + 1e-12);
    }
}
