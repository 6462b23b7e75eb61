//! Exact finite-N variance of the SU(2) smooth linear statistic
//!
//! Var(Z, φ) = (1/16π²) ∫∫ Δφ(z) Δφ(w) Li₂(ρ(z, w)^{2N}) dA(z) dA(w),
//! ρ² = |1 + z w̄|² / ((1 + |z|²)(1 + |w|²)),
//!
//! compared with the Monte-Carlo variance of root sums.

use std::f64::consts::PI;

use zc_core::currents::{pair_points, TestFunction};
use zc_core::ensemble::{build_ensemble, sample, EnsembleSpec};
use zc_core::quadrature::composite_gauss_legendre;
use zc_core::rootfind::roots_of;
use zc_core::stats::Summary;
use zc_core::C64;

fn dilog(x: f64) -> f64 {
    if x >= 1.0 {
        return PI * PI / 6.0;
    }
    if x > 0.5 {
        return PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x);
    }
    let (mut sum, mut power, mut k) = (0.0, x, 1.0);
    while power > 1e-18 {
        sum += power / (k * k);
        power *= x;
        k += 1.0;
    }
    sum
}

/// Variance of `(Ṽ Z, φ)` for a bump centered at the origin.
fn exact_variance(phi: &TestFunction, n: u32) -> f64 {
    let (r, wr) = composite_gauss_legendre(0.0, phi.radius, 24, 8);
    let lap: Vec<f64> = r.iter().map(|x| phi.laplacian(C64::new(*x, 0.0))).collect();
    let angles = 512;
    let mut total = 0.0;
    for i in 0..r.len() {
        for j in 0..r.len() {
            let (a, b) = (r[i], r[j]);
            let denom = (1.0 + a * a) * (1.0 + b * b);
            let mut ring = 0.0;
            for k in 0..angles {
                let t = 2.0 * PI * k as f64 / angles as f64;
                let rho2 = (1.0 + a * a * b * b + 2.0 * a * b * t.cos()) / denom;
                ring += dilog(rho2.min(1.0).powi(n as i32));
            }
            ring *= 2.0 * PI / angles as f64;
            total += wr[i] * wr[j] * a * b * lap[i] * lap[j] * ring;
        }
    }
    2.0 * PI * total / (16.0 * PI * PI) / (n as f64 * n as f64)
}

#[test]
fn dilog_special_values() {
    assert!((dilog(1.0) - PI * PI / 6.0).abs() < 1e-14);
    assert!((dilog(0.5) - (PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2))).abs() < 1e-14);
    assert_eq!(dilog(0.0), 0.0);
}

#[test]
fn su2_variance_matches_the_dilogarithm_formula() {
    let phi = TestFunction::new(C64::new(0.0, 0.0), 0.6);
    for n in [20u32, 40] {
        let b = build_ensemble(&format!("family=su2 N={n}").parse::<EnsembleSpec>().unwrap()).unwrap();
        let values: Vec<f64> = (0..3000)
            .map(|t| {
                let zeros = roots_of(&sample(&b, 41, t).univariate().unwrap()).unwrap();
                pair_points(&zeros, &phi, n, 1).unwrap().normalized
            })
            .collect();
        let mc = Summary::of(&values);
        let exact = exact_variance(&phi, n);
        assert!(
            (mc.variance - exact).abs() <= 3.0 * mc.variance_se,
            "N={n}: MC {} ± {} vs exact {exact}",
            mc.variance,
            mc.variance_se
        );
    }
}
