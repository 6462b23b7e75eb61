//! Diagonal Szegő kernel and expected zero densities on grids.
//!
//! For one equation in one variable the expected zero measure has density
//! `(1/4π) Δ log Π + c₁` with respect to Lebesgue area, where `Π` is the
//! diagonal kernel in the metric `h` and `c₁` the curvature density of `h`.
//! For two equations in two variables drawn independently from the same
//! ensemble, the expected simultaneous zero measure is the wedge
//! `(i/2π ∂∂̄U)²` with `U = log Σ |f_j|²` (the metric terms recombine),
//! whose density is `(2/π²) det(∂²U/∂z_j∂z̄_k)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::ensemble::{Metric, PolynomialBasis};
use crate::grid::ComplexGrid;
use crate::{Point, C64};

/// Nodes excluded at each window edge before stencils are applied.
pub const STENCIL_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SzegoError {
    #[error("grid dimension {grid} does not match basis dimension {basis}")]
    DimensionMismatch { grid: usize, basis: usize },
    #[error("kernel vanishes at {point:?}: base point inside the window, shrink it")]
    BasePoint { point: Point },
    #[error("expected densities of different grids cannot be combined")]
    GridMismatch,
}

/// `log Π(z, z)` at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoKernelGrid {
    grid: ComplexGrid,
    log_values: Vec<f64>,
    metric: Metric,
}

impl SzegoKernelGrid {
    pub fn grid(&self) -> &ComplexGrid {
        &self.grid
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// `Π` itself (overflows to `∞` where `log Π > 709`).
    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|v| v.exp()).collect()
    }

    /// `U = log Π + N log(1 + ‖z‖²)`: the metric-free potential.
    fn potential(&self) -> Vec<f64> {
        match self.metric {
            Metric::Flat => self.log_values.clone(),
            Metric::FubiniStudy(n) => self
                .log_values
                .iter()
                .enumerate()
                .map(|(i, v)| v + n as f64 * self.grid.point(i).norm_sqr().ln_1p())
                .collect(),
        }
    }
}

/// Evaluates `log Σ_j |S_j|²_h` on every node.
pub fn kernel_on_grid(basis: &PolynomialBasis, grid: &ComplexGrid) -> Result<SzegoKernelGrid, SzegoError> {
    if grid.dim() != basis.dim() {
        return Err(SzegoError::DimensionMismatch {
            grid: grid.dim(),
            basis: basis.dim(),
        });
    }
    let log_values = (0..grid.len()).map(|i| basis.log_kernel(&grid.point(i))).collect();
    Ok(SzegoKernelGrid {
        grid: grid.clone(),
        log_values,
        metric: basis.metric(),
    })
}

/// Builds a kernel grid from precomputed `log Π` values (for callers that
/// evaluate nodes in parallel).
pub fn kernel_from_values(grid: ComplexGrid, log_values: Vec<f64>, metric: Metric) -> SzegoKernelGrid {
    assert_eq!(grid.len(), log_values.len());
    SzegoKernelGrid {
        grid,
        log_values,
        metric,
    }
}

/// Expected zero density with a per-node discretization error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedZeroDensity {
    grid: ComplexGrid,
    density: Vec<f64>,
    error: Vec<f64>,
    includes_c1: bool,
}

impl ExpectedZeroDensity {
    pub fn grid(&self) -> &ComplexGrid {
        &self.grid
    }

    /// Density per unit Lebesgue measure; zero within the stencil margin.
    pub fn values(&self) -> &[f64] {
        &self.density
    }

    /// Richardson estimate of the stencil error at each node.
    pub fn errors(&self) -> &[f64] {
        &self.error
    }

    pub fn includes_c1(&self) -> bool {
        self.includes_c1
    }

    /// Largest per-node stencil error.
    pub fn stencil_bound(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }

    /// Mass `Σ ρ ΔV` over interior nodes.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Mass and its stencil error over nodes accepted by `keep`.
    pub fn mass_where<F: Fn(&Point) -> bool>(&self, keep: F) -> (f64, f64) {
        let vol = self.grid.cell_volume();
        let mut m = 0.0;
        let mut e = 0.0;
        for (i, (d, err)) in self.density.iter().zip(&self.error).enumerate() {
            if keep(&self.grid.point(i)) {
                m += d * vol;
                e += err * vol;
            }
        }
        (m, e)
    }

    /// `Σ ρ φ ΔV`.
    pub fn integrate<F: Fn(&Point) -> f64>(&self, phi: F) -> (f64, f64) {
        let vol = self.grid.cell_volume();
        let mut m = 0.0;
        let mut e = 0.0;
        for (i, (d, err)) in self.density.iter().zip(&self.error).enumerate() {
            if *d == 0.0 && *err == 0.0 {
                continue;
            }
            let f = phi(&self.grid.point(i));
            m += d * f * vol;
            e += err * f.abs() * vol;
        }
        (m, e)
    }
}

fn second_derivatives(u: &[f64], grid: &ComplexGrid, multi: [usize; 4], step: usize) -> [[f64; 4]; 4] {
    let axes = grid.axes().len();
    let s = grid.strides();
    let i = grid.flatten(multi);
    let mut d = [[0.0; 4]; 4];
    for a in 0..axes {
        let ha = grid.spacing(a) * step as f64;
        let sa = s[a] * step;
        d[a][a] = (u[i + sa] - 2.0 * u[i] + u[i - sa]) / (ha * ha);
        for b in a + 1..axes {
            let hb = grid.spacing(b) * step as f64;
            let sb = s[b] * step;
            let v = (u[i + sa + sb] - u[i + sa - sb] - u[i - sa + sb] + u[i - sa - sb]) / (4.0 * ha * hb);
            d[a][b] = v;
            d[b][a] = v;
        }
    }
    d
}

/// Complex Hessian `∂²u/∂z_j∂z̄_k` from the real Hessian in the axis order
/// `(x₁, y₁, x₂, y₂)`.
fn complex_hessian(d: &[[f64; 4]; 4]) -> [[C64; 2]; 2] {
    let mut h = [[C64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let (x, y, p, q) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            h[j][k] = C64::new(d[x][p] + d[y][q], d[x][q] - d[y][p]) * 0.25;
        }
    }
    h
}

fn density_at(kernel_dim: usize, u: &[f64], grid: &ComplexGrid, multi: [usize; 4], step: usize) -> f64 {
    let d = second_derivatives(u, grid, multi, step);
    if kernel_dim == 1 {
        (d[0][0] + d[1][1]) / (4.0 * PI)
    } else {
        let h = complex_hessian(&d);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        2.0 * det.re / (PI * PI)
    }
}

fn mixed_density_at(u: &[f64], v: &[f64], grid: &ComplexGrid, multi: [usize; 4], step: usize) -> f64 {
    let a = complex_hessian(&second_derivatives(u, grid, multi, step));
    let b = complex_hessian(&second_derivatives(v, grid, multi, step));
    let s = a[0][0] * b[1][1] + a[1][1] * b[0][0] - a[0][1] * b[1][0] - a[1][0] * b[0][1];
    s.re / (PI * PI)
}

fn check_finite(kernel: &SzegoKernelGrid) -> Result<(), SzegoError> {
    match kernel.log_values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(SzegoError::BasePoint {
            point: kernel.grid.point(i),
        }),
        None => Ok(()),
    }
}

/// `E Z` on the interior of the kernel's grid.
///
/// For `m = 1` the density is `(1/4π) Δ_h log Π + c₁` with the five-point
/// Laplacian; for `m = 2` it is the Monge–Ampère density of two independent
/// sections from the same ensemble, using the nine-point mixed stencil per
/// coordinate pair. The per-node error is `|ρ_h − ρ_{2h}| / 3`.
pub fn expected_density(kernel: &SzegoKernelGrid) -> Result<ExpectedZeroDensity, SzegoError> {
    check_finite(kernel)?;
    let grid = &kernel.grid;
    let dim = grid.dim();
    let n = grid.len();
    let mut density = vec![0.0; n];
    let mut error = vec![0.0; n];
    let (u, c1_analytic) = match (dim, kernel.metric) {
        (1, Metric::FubiniStudy(deg)) => (kernel.log_values.clone(), Some(deg)),
        (1, Metric::Flat) => (kernel.log_values.clone(), None),
        _ => (kernel.potential(), None),
    };
    for i in 0..n {
        let multi = grid.unflatten(i);
        if !grid.is_interior(multi, STENCIL_MARGIN) {
            continue;
        }
        let fine = density_at(dim, &u, grid, multi, 1);
        let coarse = density_at(dim, &u, grid, multi, 2);
        let mut rho = fine;
        if let Some(deg) = c1_analytic {
            let r2 = grid.point(i).norm_sqr();
            rho += deg as f64 / (PI * (1.0 + r2) * (1.0 + r2));
        }
        density[i] = rho;
        error[i] = (fine - coarse).abs() / 3.0;
    }
    Ok(ExpectedZeroDensity {
        grid: grid.clone(),
        density,
        error,
        includes_c1: !matches!(kernel.metric, Metric::Flat),
    })
}

/// Expected simultaneous zero density of two independent sections drawn
/// from different ensembles: `(i/2π ∂∂̄U) ∧ (i/2π ∂∂̄V)`.
pub fn expected_density_mixed(a: &SzegoKernelGrid, b: &SzegoKernelGrid) -> Result<ExpectedZeroDensity, SzegoError> {
    if a.grid != b.grid || a.grid.dim() != 2 {
        return Err(SzegoError::GridMismatch);
    }
    check_finite(a)?;
    check_finite(b)?;
    let grid = &a.grid;
    let (u, v) = (a.potential(), b.potential());
    let n = grid.len();
    let mut density = vec![0.0; n];
    let mut error = vec![0.0; n];
    for i in 0..n {
        let multi = grid.unflatten(i);
        if !grid.is_interior(multi, STENCIL_MARGIN) {
            continue;
        }
        let fine = mixed_density_at(&u, &v, grid, multi, 1);
        let coarse = mixed_density_at(&u, &v, grid, multi, 2);
        density[i] = fine;
        error[i] = (fine - coarse).abs() / 3.0;
    }
    Ok(ExpectedZeroDensity {
        grid: grid.clone(),
        density,
        error,
        includes_c1: !matches!(a.metric, Metric::Flat),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{build_ensemble, EnsembleSpec};

    fn basis(s: &str) -> PolynomialBasis {
        build_ensemble(&s.parse::<EnsembleSpec>().unwrap()).unwrap()
    }

    #[test]
    fn su2_kernel_is_one() {
        let b = basis("family=su2 N=12");
        let g = ComplexGrid::square(1, 3.0, 21).unwrap();
        let k = kernel_on_grid(&b, &g).unwrap();
        assert!(k.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn kac_kernel_geometric_series() {
        let b = basis("family=kac N=9");
        let g = ComplexGrid::square(1, 1.7, 16).unwrap();
        let k = kernel_on_grid(&b, &g).unwrap();
        for (i, v) in k.values().iter().enumerate() {
            let r2 = g.point(i).norm_sqr();
            let expect = (r2.powi(10) - 1.0) / (r2 - 1.0);
            assert!((v - expect).abs() <= 1e-10 * expect);
        }
    }

    #[test]
    fn su2_density_is_fubini_study() {
        let b = basis("family=su2 N=7");
        let g = ComplexGrid::square(1, 2.0, 41).unwrap();
        let d = expected_density(&kernel_on_grid(&b, &g).unwrap()).unwrap();
        for (i, v) in d.values().iter().enumerate() {
            if !g.is_interior(g.unflatten(i), STENCIL_MARGIN) {
                assert_eq!(*v, 0.0);
                continue;
            }
            let r2 = g.point(i).norm_sqr();
            assert!((v - 7.0 / (PI * (1.0 + r2).powi(2))).abs() < 1e-9);
        }
    }

    #[test]
    fn su3_monge_ampere_is_fubini_study_volume() {
        // (ω_FS)² density for N: N² · 2/π² · (1+|z|²)^{-3}
        let b = basis("family=su3 N=3");
        let g = ComplexGrid::square(2, 0.6, 11).unwrap();
        let d = expected_density(&kernel_on_grid(&b, &g).unwrap()).unwrap();
        for (i, v) in d.values().iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let r2 = g.point(i).norm_sqr();
            let expect = 9.0 * 2.0 / (PI * PI * (1.0 + r2).powi(3));
            assert!((v - expect).abs() < 2e-2 * expect, "{v} vs {expect}");
            assert!((v - expect).abs() <= 1.5 * d.errors()[i] + 1e-4 * expect);
        }
    }
}
