//! Limit objects: equilibrium measures, Green functions, distances.

use alloc::string::String;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::currents::{Dictionary, TestFunction};
use crate::quadrature::composite_gauss_legendre;
use crate::rng::{uniform, StreamKey};
use crate::{Point, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReferenceError {
    #[error("unknown reference measure `{0}`")]
    UnknownName(String),
    #[error("{got} empirical pairings for a dictionary of {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("reference lives in dimension {reference}, test function in {phi}")]
    DimensionMismatch { reference: usize, phi: usize },
}

/// Equilibrium measures with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceMeasure {
    /// `dθ/2π` on the unit circle (equilibrium of the disk and circle).
    CircleUniform,
    /// `dx / (π√(1−x²))` on `[−1, 1]`.
    IntervalArcsine,
    /// Unit-mass Fubini–Study area `π⁻¹(1+|z|²)⁻² dA`.
    FubiniStudy,
    /// Product of circle measures on `|z| = |w| = 1`.
    TorusUniform2d,
    /// Unit-mass Fubini–Study volume on `C²`.
    FubiniStudy2d,
}

impl ReferenceMeasure {
    pub const ALL: [ReferenceMeasure; 5] = [
        ReferenceMeasure::CircleUniform,
        ReferenceMeasure::IntervalArcsine,
        ReferenceMeasure::FubiniStudy,
        ReferenceMeasure::TorusUniform2d,
        ReferenceMeasure::FubiniStudy2d,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReferenceMeasure::CircleUniform => "circle-uniform",
            ReferenceMeasure::IntervalArcsine => "interval-arcsine",
            ReferenceMeasure::FubiniStudy => "fubini-study",
            ReferenceMeasure::TorusUniform2d => "torus-uniform-2d",
            ReferenceMeasure::FubiniStudy2d => "fubini-study-2d",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ReferenceMeasure::TorusUniform2d | ReferenceMeasure::FubiniStudy2d => 2,
            _ => 1,
        }
    }

    /// `∫ φ dμ` by a quadrature adapted to the measure.
    pub fn pairing(&self, phi: &TestFunction) -> Result<f64, ReferenceError> {
        if phi.dim != self.dim() {
            return Err(ReferenceError::DimensionMismatch {
                reference: self.dim(),
                phi: phi.dim,
            });
        }
        Ok(self.integrate(|p| phi.value(p)))
    }

    /// `∫ f dμ` for a smooth `f`.
    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        match self {
            ReferenceMeasure::CircleUniform => {
                let m = 4096;
                (0..m)
                    .map(|k| f(&Point::one(C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))))
                    .sum::<f64>()
                    / m as f64
            }
            ReferenceMeasure::IntervalArcsine => {
                let m = 4096;
                (0..m)
                    .map(|k| {
                        let x = (PI * (2 * k + 1) as f64 / (2 * m) as f64).cos();
                        f(&Point::one(C64::new(x, 0.0)))
                    })
                    .sum::<f64>()
                    / m as f64
            }
            ReferenceMeasure::FubiniStudy => {
                // s = ρ²/(1+ρ²) is uniform on [0, 1) under the measure
                let (s, w) = composite_gauss_legendre(0.0, 1.0, 256, 8);
                let m = 512;
                let mut acc = 0.0;
                for (si, wi) in s.iter().zip(&w) {
                    let rho = (si / (1.0 - si)).sqrt();
                    let ring: f64 = (0..m)
                        .map(|k| f(&Point::one(C64::from_polar(rho, 2.0 * PI * k as f64 / m as f64))))
                        .sum();
                    acc += wi * ring / m as f64;
                }
                acc
            }
            ReferenceMeasure::TorusUniform2d => {
                let m = 512;
                let mut acc = 0.0;
                for a in 0..m {
                    let z = C64::from_polar(1.0, 2.0 * PI * a as f64 / m as f64);
                    for b in 0..m {
                        let w = C64::from_polar(1.0, 2.0 * PI * b as f64 / m as f64);
                        acc += f(&Point::two(z, w));
                    }
                }
                acc / (m * m) as f64
            }
            ReferenceMeasure::FubiniStudy2d => {
                // moment map (s₁, s₂) = (|z|², |w|²)/(1+‖·‖²) is uniform on
                // the simplex; Duffy map s₁ = a, s₂ = (1−a) b
                let (a, wa) = composite_gauss_legendre(0.0, 1.0, 48, 6);
                let m = 48;
                let mut acc = 0.0;
                for (ai, wai) in a.iter().zip(&wa) {
                    for (bi, wbi) in a.iter().zip(&wa) {
                        let s1 = *ai;
                        let s2 = (1.0 - ai) * bi;
                        let rest = 1.0 - s1 - s2;
                        if rest <= 0.0 {
                            continue;
                        }
                        let (r1, r2) = ((s1 / rest).sqrt(), (s2 / rest).sqrt());
                        let mut ring = 0.0;
                        for p in 0..m {
                            let z = C64::from_polar(r1, 2.0 * PI * (p as f64 + 0.5) / m as f64);
                            for q in 0..m {
                                let w = C64::from_polar(r2, 2.0 * PI * q as f64 / m as f64);
                                ring += f(&Point::two(z, w));
                            }
                        }
                        // density 2 on the simplex, Jacobian (1 − a)
                        acc += 2.0 * wai * wbi * (1.0 - ai) * ring / (m * m) as f64;
                    }
                }
                acc
            }
        }
    }

    /// `count` independent draws from the stream `key`.
    pub fn sample(&self, key: StreamKey, count: usize) -> Vec<Point> {
        let mut rng = key.rng();
        (0..count)
            .map(|_| {
                let u = uniform(&mut rng);
                let v = uniform(&mut rng);
                match self {
                    ReferenceMeasure::CircleUniform => Point::one(C64::from_polar(1.0, 2.0 * PI * u)),
                    ReferenceMeasure::IntervalArcsine => Point::one(C64::new((PI * u).cos(), 0.0)),
                    ReferenceMeasure::FubiniStudy => Point::one(C64::from_polar((u / (1.0 - u)).sqrt(), 2.0 * PI * v)),
                    ReferenceMeasure::TorusUniform2d => {
                        Point::two(C64::from_polar(1.0, 2.0 * PI * u), C64::from_polar(1.0, 2.0 * PI * v))
                    }
                    ReferenceMeasure::FubiniStudy2d => {
                        let (mut s1, mut s2) = (u, v);
                        if s1 + s2 > 1.0 {
                            s1 = 1.0 - s1;
                            s2 = 1.0 - s2;
                        }
                        let rest = (1.0 - s1 - s2).max(f64::MIN_POSITIVE);
                        let a = uniform(&mut rng);
                        let b = uniform(&mut rng);
                        Point::two(
                            C64::from_polar((s1 / rest).sqrt(), 2.0 * PI * a),
                            C64::from_polar((s2 / rest).sqrt(), 2.0 * PI * b),
                        )
                    }
                }
            })
            .collect()
    }

    /// One-dimensional statistic of a point whose law under the measure has
    /// CDF [`ReferenceMeasure::statistic_cdf`].
    pub fn statistic(&self, p: &Point) -> f64 {
        match self {
            ReferenceMeasure::CircleUniform | ReferenceMeasure::TorusUniform2d => {
                num_traits::Euclid::rem_euclid(&p.z.arg(), &(2.0 * PI)) / (2.0 * PI)
            }
            ReferenceMeasure::IntervalArcsine => p.z.re,
            ReferenceMeasure::FubiniStudy => p.z.norm_sqr(),
            ReferenceMeasure::FubiniStudy2d => p.z.norm_sqr() / (1.0 + p.norm_sqr()),
        }
    }

    pub fn statistic_cdf(&self, x: f64) -> f64 {
        match self {
            ReferenceMeasure::CircleUniform | ReferenceMeasure::TorusUniform2d => x.clamp(0.0, 1.0),
            ReferenceMeasure::IntervalArcsine => 0.5 + x.clamp(-1.0, 1.0).asin() / PI,
            ReferenceMeasure::FubiniStudy => {
                let x = x.max(0.0);
                x / (1.0 + x)
            }
            ReferenceMeasure::FubiniStudy2d => {
                let x = x.clamp(0.0, 1.0);
                1.0 - (1.0 - x) * (1.0 - x)
            }
        }
    }

    /// Reference pairings for every function of a dictionary.
    pub fn pairings(&self, dict: &Dictionary) -> Result<Vec<f64>, ReferenceError> {
        dict.iter().map(|phi| self.pairing(phi)).collect()
    }
}

impl fmt::Display for ReferenceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferenceMeasure {
    type Err = ReferenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| ReferenceError::UnknownName(s.to_string()))
    }
}

/// `max_φ |empirical(φ) − reference(φ)|`.
pub fn discrepancy(empirical: &[f64], reference: &[f64]) -> Result<f64, ReferenceError> {
    if empirical.len() != reference.len() {
        return Err(ReferenceError::LengthMismatch {
            got: empirical.len(),
            expected: reference.len(),
        });
    }
    Ok(empirical
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Pluricomplex Green functions with a pole at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenFunction {
    /// `log⁺|z|`.
    Disk,
    /// `log|z + √(z²−1)|` on the branch where the modulus is at least 1.
    Interval,
    /// `max(log⁺|z|, log⁺|w|)` for the bidisk (and the torus).
    Bidisk,
    /// `max(V_I(z), V_I(w))` for the square `[−1,1]²`.
    Square,
}

fn interval_green(z: C64) -> f64 {
    let s = (z * z - C64::new(1.0, 0.0)).sqrt();
    let a = (z + s).norm();
    let b = (z - s).norm();
    a.max(b).ln().max(0.0)
}

impl GreenFunction {
    pub fn dim(&self) -> usize {
        match self {
            GreenFunction::Disk | GreenFunction::Interval => 1,
            _ => 2,
        }
    }

    pub fn value(&self, p: &Point) -> f64 {
        match self {
            GreenFunction::Disk => p.z.norm().ln().max(0.0),
            GreenFunction::Interval => interval_green(p.z),
            GreenFunction::Bidisk => p.z.norm().ln().max(p.w.norm().ln()).max(0.0),
            GreenFunction::Square => interval_green(p.z).max(interval_green(p.w)),
        }
    }

    /// `lim V(z) − log‖z‖` (Robin constant, sign convention `V ≈ log‖z‖ + γ`).
    pub fn robin_constant(&self) -> f64 {
        match self {
            GreenFunction::Disk | GreenFunction::Bidisk => 0.0,
            GreenFunction::Interval | GreenFunction::Square => core::f64::consts::LN_2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_pairing_with_covering_bump() {
        // bump of radius 10 at 0 equals exp(1 - 1/(1 - 1/100)) on the circle
        let phi = TestFunction::new(C64::new(0.0, 0.0), 10.0);
        let v = ReferenceMeasure::CircleUniform.pairing(&phi).unwrap();
        let expect = (1.0 - 1.0 / (1.0 - 0.01f64)).exp();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn arcsine_second_moment() {
        let v = ReferenceMeasure::IntervalArcsine.integrate(|p| p.z.re * p.z.re);
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fubini_study_radial_oracle() {
        let r: f64 = 0.6;
        let phi = TestFunction::new(C64::new(0.0, 0.0), r);
        let got = ReferenceMeasure::FubiniStudy.pairing(&phi).unwrap();
        // (1/π)(1+ρ²)⁻² u(ρ²/r²) 2πρ dρ on [0, r]
        let (x, w) = composite_gauss_legendre(0.0, r, 400, 10);
        let oracle: f64 = x
            .iter()
            .zip(&w)
            .map(|(rho, w)| w * 2.0 * rho * crate::currents::bump(rho * rho / (r * r)) / (1.0 + rho * rho).powi(2))
            .sum();
        assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
    }

    #[test]
    fn masses_are_one() {
        for r in ReferenceMeasure::ALL {
            let m = r.integrate(|_| 1.0);
            assert!((m - 1.0).abs() < 1e-12, "{r}: {m}");
        }
    }

    #[test]
    fn fs2d_moment() {
        // E[s₁] = 1/3 for the uniform simplex
        let v = ReferenceMeasure::FubiniStudy2d.integrate(|p| p.z.norm_sqr() / (1.0 + p.norm_sqr()));
        assert!((v - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn discrepancy_examples() {
        let a = [0.1, 0.2, 0.3];
        assert_eq!(discrepancy(&a, &a).unwrap(), 0.0);
        let b = [0.1, 0.3, 0.3];
        assert!((discrepancy(&b, &a).unwrap() - 0.1).abs() < 1e-15);
        assert!(discrepancy(&a[..2], &a).is_err());
    }

    #[test]
    fn green_functions_vanish_on_k_and_grow_like_log() {
        for k in 0..100 {
            let t = 2.0 * PI * k as f64 / 100.0;
            assert!(GreenFunction::Disk.value(&Point::one(C64::from_polar(1.0, t))).abs() <= 1e-10);
            let x = -1.0 + 2.0 * k as f64 / 99.0;
            assert!(GreenFunction::Interval.value(&Point::one(C64::new(x, 0.0))).abs() <= 1e-10);
        }
        for g in [GreenFunction::Disk, GreenFunction::Interval] {
            for t in [0.3, 1.9, 4.0] {
                let z = C64::from_polar(1e3, t);
                let v = g.value(&Point::one(z));
                assert!((v - z.norm().ln() - g.robin_constant()).abs() < 0.01);
                assert!(v >= 0.0);
            }
        }
    }
}
