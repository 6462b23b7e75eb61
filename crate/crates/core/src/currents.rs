//! Linear statistics of zero sets against smooth bump test functions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::ensemble::GaussianSample;
use crate::grid::{Axis, ComplexGrid};
use crate::rootfind::ZeroSet;
use crate::{Point, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurrentsError {
    #[error("zero set dimension {zeros} does not match codimension {codim}")]
    DimensionMismatch { zeros: usize, codim: usize },
    #[error("the quadrature route is only available in one variable")]
    NotUnivariate,
    #[error("test function support is not inside the grid window")]
    SupportOutsideGrid,
    #[error("dictionary index {index} out of range (size {len})")]
    NoSuchFunction { index: usize, len: usize },
}

/// `u(t) = exp(1 − 1/(1 − t))` for `t < 1`, else 0.
pub fn bump(t: f64) -> f64 {
    if (0.0..1.0).contains(&t) {
        (1.0 - 1.0 / (1.0 - t)).exp()
    } else if t < 0.0 {
        f64::NAN
    } else {
        0.0
    }
}

/// `(u(t), u'(t), u''(t))`.
pub fn bump_derivatives(t: f64) -> (f64, f64, f64) {
    if !(t < 1.0) {
        return (0.0, 0.0, 0.0);
    }
    let v = 1.0 / (1.0 - t);
    let u = (1.0 - v).exp();
    let v2 = v * v;
    (u, -v2 * u, u * (v2 * v2 - 2.0 * v2 * v))
}

/// Radial bump `φ(z) = u(|z − a|²/r²)` in one variable, or the product of
/// such bumps per coordinate in two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub dim: usize,
    pub center: Point,
    pub radius: f64,
}

impl TestFunction {
    pub fn new(center: C64, radius: f64) -> Self {
        TestFunction {
            dim: 1,
            center: Point::one(center),
            radius,
        }
    }

    pub fn product(center: Point, radius: f64) -> Self {
        TestFunction { dim: 2, center, radius }
    }

    fn t(&self, z: C64, a: C64) -> f64 {
        (z - a).norm_sqr() / (self.radius * self.radius)
    }

    pub fn value(&self, p: &Point) -> f64 {
        let v = bump(self.t(p.z, self.center.z));
        if self.dim == 1 || v == 0.0 {
            v
        } else {
            v * bump(self.t(p.w, self.center.w))
        }
    }

    /// `Δφ = (4/r²)(t u''(t) + u'(t))` (one variable).
    pub fn laplacian(&self, z: C64) -> f64 {
        let t = self.t(z, self.center.z);
        let (_, d1, d2) = bump_derivatives(t);
        4.0 / (self.radius * self.radius) * (t * d2 + d1)
    }

    /// Support box `[a − r, a + r]` per real axis.
    pub fn support_axes(&self) -> Vec<(f64, f64)> {
        let r = self.radius;
        let mut out = vec![
            (self.center.z.re - r, self.center.z.re + r),
            (self.center.z.im - r, self.center.z.im + r),
        ];
        if self.dim == 2 {
            out.push((self.center.w.re - r, self.center.w.re + r));
            out.push((self.center.w.im - r, self.center.w.im + r));
        }
        out
    }

    /// Grid whose `cells × cells` cells tile the support box (one variable).
    pub fn support_grid(&self, cells: usize) -> ComplexGrid {
        let axes = self
            .support_axes()
            .into_iter()
            .map(|(lo, hi)| Axis::new(lo, hi, cells + 1))
            .collect();
        ComplexGrid::new(self.dim, axes).expect("support grid has at least 8 nodes per axis")
    }
}

/// The standard test-function dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    functions: Vec<TestFunction>,
}

impl Dictionary {
    /// Five bumps for each dimension: in one variable centers
    /// `{0, ±0.8, ±0.8i}` and radius 0.6; in two variables product bumps of
    /// radius 1 centered at `(1,1), (−1,−1), (i,−i), (−i,i), (1,−1)`.
    pub fn standard(dim: usize) -> Self {
        let c = |re, im| C64::new(re, im);
        let functions = if dim == 1 {
            [c(0.0, 0.0), c(0.8, 0.0), c(-0.8, 0.0), c(0.0, 0.8), c(0.0, -0.8)]
                .into_iter()
                .map(|a| TestFunction::new(a, 0.6))
                .collect()
        } else {
            [
                (c(1.0, 0.0), c(1.0, 0.0)),
                (c(-1.0, 0.0), c(-1.0, 0.0)),
                (c(0.0, 1.0), c(0.0, -1.0)),
                (c(0.0, -1.0), c(0.0, 1.0)),
                (c(1.0, 0.0), c(-1.0, 0.0)),
            ]
            .into_iter()
            .map(|(z, w)| TestFunction::product(Point::two(z, w), 1.0))
            .collect()
        };
        Dictionary { functions }
    }

    pub fn from_functions(functions: Vec<TestFunction>) -> Self {
        Dictionary { functions }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&TestFunction, CurrentsError> {
        self.functions.get(index).ok_or(CurrentsError::NoSuchFunction {
            index,
            len: self.functions.len(),
        })
    }

    pub fn iter(&self) -> core::slice::Iter<'_, TestFunction> {
        self.functions.iter()
    }

    /// Sub-dictionary by indices.
    pub fn select(&self, indices: &[usize]) -> Result<Self, CurrentsError> {
        let functions = indices
            .iter()
            .map(|i| self.get(*i).copied())
            .collect::<Result<_, _>>()?;
        Ok(Dictionary { functions })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingMethod {
    RootSum,
    PoincareLelong,
}

/// `(Z, φ)` and `(Ṽ Z, φ) = N^{−k} (Z, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub raw: f64,
    pub normalized: f64,
    pub method: PairingMethod,
}

impl PairingResult {
    fn new(raw: f64, degree: u32, codim: usize, method: PairingMethod) -> Self {
        PairingResult {
            raw,
            normalized: raw / (degree as f64).powi(codim as i32),
            method,
        }
    }
}

/// `Σ_{p ∈ Z} φ(p)`, each cluster member counted once so that multiple
/// roots contribute their multiplicity.
pub fn pair_points(
    zeros: &ZeroSet,
    phi: &TestFunction,
    degree: u32,
    codim: usize,
) -> Result<PairingResult, CurrentsError> {
    if zeros.dim != codim || phi.dim != codim {
        return Err(CurrentsError::DimensionMismatch {
            zeros: zeros.dim,
            codim,
        });
    }
    let raw = zeros.points.iter().map(|p| phi.value(p)).sum();
    Ok(PairingResult::new(raw, degree, codim, PairingMethod::RootSum))
}

/// Poincaré–Lelong route: `(1/2π) ∫ log|f| Δφ dA` by the midpoint rule on
/// the cells of `grid`.
pub fn pair_pl(
    sample: &GaussianSample<'_>,
    phi: &TestFunction,
    grid: &ComplexGrid,
) -> Result<PairingResult, CurrentsError> {
    if grid.dim() != 1 || phi.dim != 1 || sample.basis().dim() != 1 {
        return Err(CurrentsError::NotUnivariate);
    }
    let ax = grid.axes();
    let support = phi.support_axes();
    let tiny = 1e-12 * phi.radius;
    for k in 0..2 {
        if support[k].0 < ax[k].lo - tiny || support[k].1 > ax[k].hi + tiny {
            return Err(CurrentsError::SupportOutsideGrid);
        }
    }
    let (hx, hy) = (ax[0].spacing(), ax[1].spacing());
    let mut acc = 0.0;
    for i in 0..ax[0].n - 1 {
        let x = ax[0].lo + (i as f64 + 0.5) * hx;
        let mut row = 0.0;
        for j in 0..ax[1].n - 1 {
            let z = C64::new(x, ax[1].lo + (j as f64 + 0.5) * hy);
            let lap = phi.laplacian(z);
            if lap == 0.0 {
                continue;
            }
            let mut f = sample.evaluate(&Point::one(z));
            if f == C64::new(0.0, 0.0) {
                f = sample.evaluate(&Point::one(z + C64::new(0.5 * hx, 0.5 * hy)));
            }
            row += f.norm().ln() * lap;
        }
        acc += row;
    }
    let raw = acc * hx * hy / (2.0 * PI);
    Ok(PairingResult::new(
        raw,
        sample.basis().degree(),
        1,
        PairingMethod::PoincareLelong,
    ))
}

/// `∫ Δφ dA` by the same midpoint rule (zero for compact support).
pub fn laplacian_integral(phi: &TestFunction, cells: usize) -> f64 {
    let g = phi.support_grid(cells);
    let ax = g.axes();
    let (hx, hy) = (ax[0].spacing(), ax[1].spacing());
    let mut acc = 0.0;
    for i in 0..cells {
        for j in 0..cells {
            let z = C64::new(ax[0].lo + (i as f64 + 0.5) * hx, ax[1].lo + (j as f64 + 0.5) * hy);
            acc += phi.laplacian(z);
        }
    }
    acc * hx * hy
}

/// Norms of `∂∂̄φ` relative to the unit-mass Fubini–Study area form:
/// writing `i∂∂̄φ = g ω_FS`, returns `(sup |g|, ∫ |g|² dω_FS)`.
///
/// With `i∂∂̄φ = ½Δφ dx∧dy` and `ω_FS = π⁻¹(1+|z|²)⁻² dx∧dy`,
/// `g = (π/2) Δφ (1+|z|²)²`.
pub fn fs_hessian_norms(phi: &TestFunction, cells: usize) -> (f64, f64) {
    let g = phi.support_grid(cells);
    let ax = g.axes();
    let (hx, hy) = (ax[0].spacing(), ax[1].spacing());
    let mut sup: f64 = 0.0;
    let mut l2 = 0.0;
    for i in 0..cells {
        for j in 0..cells {
            let z = C64::new(ax[0].lo + (i as f64 + 0.5) * hx, ax[1].lo + (j as f64 + 0.5) * hy);
            let w = 1.0 + z.norm_sqr();
            let gv = 0.5 * PI * phi.laplacian(z) * w * w;
            sup = sup.max(gv.abs());
            l2 += gv * gv / (PI * w * w);
        }
    }
    (sup, l2 * hx * hy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfind::roots_univariate;

    #[test]
    fn bump_examples() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert!(bump(0.999_999) < 1e-300);
        let (u, d1, d2) = bump_derivatives(0.0);
        assert_eq!((u, d1, d2), (1.0, -1.0, -1.0));
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        let phi = TestFunction::new(C64::new(0.2, -0.1), 0.6);
        for k in 0..40 {
            let z = C64::new(-0.35 + 0.03 * k as f64, 0.25 - 0.02 * k as f64);
            let f = |dz: C64| phi.value(&Point::one(z + dz));
            let five_point = |h: f64| {
                (f(C64::new(h, 0.0)) + f(C64::new(-h, 0.0)) + f(C64::new(0.0, h)) + f(C64::new(0.0, -h))
                    - 4.0 * f(C64::new(0.0, 0.0)))
                    / (h * h)
            };
            // Richardson-extrapolated central differences
            let fd = (4.0 * five_point(2e-4) - five_point(4e-4)) / 3.0;
            assert!((fd - phi.laplacian(z)).abs() < 1e-6);
        }
    }

    #[test]
    fn laplacian_integrates_to_zero() {
        let phi = TestFunction::new(C64::new(0.8, 0.0), 0.6);
        assert!(laplacian_integral(&phi, 512).abs() < 1e-8);
    }

    #[test]
    fn pair_points_examples() {
        let zeros = roots_univariate(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let phi = TestFunction::new(C64::new(0.0, 1.0), 0.5);
        let r = pair_points(&zeros, &phi, 2, 1).unwrap();
        assert!((r.raw - 1.0).abs() < 1e-12);
        assert_eq!(r.normalized, r.raw / 2.0);
        let far = TestFunction::new(C64::new(3.0, 0.0), 0.5);
        assert_eq!(pair_points(&zeros, &far, 2, 1).unwrap().raw, 0.0);
    }
}
