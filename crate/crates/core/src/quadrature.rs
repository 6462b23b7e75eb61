//! One-dimensional quadrature rules and a few special-function helpers.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float as _;

/// Gauss–Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi approximation. Accurate to a few ulps for `n` up to several
/// thousand.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels of
/// `order` nodes each.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let len = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * len;
        for (xi, wi) in gx.iter().zip(&gw) {
            x.push(lo + 0.5 * len * (xi + 1.0));
            w.push(0.5 * len * wi);
        }
    }
    (x, w)
}

/// Chebyshev points of the first kind, `cos((2k+1)π/(2n))`.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// `ln(n!)` by direct summation; exact enough for the multinomial weights
/// used at the degrees this crate handles.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln` of the multinomial coefficient `d! / (d-|α|)! α₁! α₂!`.
pub fn ln_multinomial(d: u32, exp: [u32; 2]) -> f64 {
    let rest = d - exp[0] - exp[1];
    ln_factorial(d) - ln_factorial(rest) - ln_factorial(exp[0]) - ln_factorial(exp[1])
}

/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫ x^18 over [-1,1] = 2/19
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_large_order() {
        let (x, w) = gauss_legendre(301);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * (3.0 * x).cos()).sum();
        assert!((m - 2.0 * (3.0f64).sin() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn multinomial_matches_binomial() {
        let v = ln_multinomial(3, [1, 0]).exp();
        assert!((v - 3.0).abs() < 1e-12);
        let v = ln_multinomial(4, [1, 1]).exp();
        assert!((v - 12.0).abs() < 1e-11);
    }
}
