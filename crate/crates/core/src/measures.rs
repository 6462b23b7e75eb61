//! Discrete quadrature representations of probability measures on compact
//! sets `K ⊂ C^m`.
//!
//! Every shipped measure satisfies a Bernstein–Markov inequality on its
//! support; measures built with [`QuadratureMeasure::custom`] carry no such
//! guarantee.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::quadrature::{chebyshev_nodes, gauss_legendre};
use crate::{Point, C64};

/// Smallest accepted resolution for the named rules.
pub const MIN_RESOLUTION: usize = 4;

/// Tolerance on the total mass of a measure.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("unknown measure name `{0}`")]
    UnknownName(String),
    #[error("resolution {got} is below the minimum {min}")]
    ResolutionTooSmall { got: usize, min: usize },
    #[error("measure needs at least one node and equally many weights (nodes {nodes}, weights {weights})")]
    LengthMismatch { nodes: usize, weights: usize },
    #[error("weight {index} is not strictly positive")]
    NonPositiveWeight { index: usize },
    #[error("total mass {got} differs from declared mass {expected}")]
    MassMismatch { got: f64, expected: f64 },
    #[error("integrand is not finite at node {index}")]
    NonFinite { index: usize },
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
}

/// Stable names of the shipped measures; these strings appear in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureName {
    UnitCircleArc,
    UnitDiskArea,
    IntervalArcsine,
    IntervalUniform,
    Torus2d,
    BidiskArea,
    /// Fubini–Study probability measure on `C^m`; used for Gram checks of the
    /// SU(m+1) and polytope ensembles.
    FubiniStudy,
    Custom,
}

impl MeasureName {
    pub const NAMED: [MeasureName; 6] = [
        MeasureName::UnitCircleArc,
        MeasureName::UnitDiskArea,
        MeasureName::IntervalArcsine,
        MeasureName::IntervalUniform,
        MeasureName::Torus2d,
        MeasureName::BidiskArea,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureName::UnitCircleArc => "unit-circle-arc",
            MeasureName::UnitDiskArea => "unit-disk-area",
            MeasureName::IntervalArcsine => "interval-arcsine",
            MeasureName::IntervalUniform => "interval-uniform",
            MeasureName::Torus2d => "torus-2d",
            MeasureName::BidiskArea => "bidisk-area",
            MeasureName::FubiniStudy => "fubini-study",
            MeasureName::Custom => "custom",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureName::Torus2d | MeasureName::BidiskArea => 2,
            _ => 1,
        }
    }

    /// Resolution that makes Gram matrices of polynomials of degree `degree`
    /// exact under this rule.
    pub fn resolution_for_degree(&self, degree: u32) -> usize {
        let d = degree as usize;
        match self {
            MeasureName::UnitCircleArc | MeasureName::Torus2d => (2 * d + 2).max(MIN_RESOLUTION),
            MeasureName::IntervalArcsine | MeasureName::IntervalUniform => (2 * d + 2).max(MIN_RESOLUTION),
            MeasureName::UnitDiskArea | MeasureName::BidiskArea => (d + 2).max(MIN_RESOLUTION),
            MeasureName::FubiniStudy | MeasureName::Custom => (d + 2).max(MIN_RESOLUTION),
        }
    }
}

impl fmt::Display for MeasureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureName {
    type Err = MeasureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureName::NAMED
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| MeasureError::UnknownName(s.to_string()))
    }
}

/// Nodes and strictly positive weights standing in for a measure `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMeasure {
    dim: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    label: MeasureName,
}

impl QuadratureMeasure {
    /// Builds one of the named rules.
    ///
    /// * circle / torus: equispaced angles, equal weights;
    /// * interval-arcsine: Chebyshev points, equal weights;
    /// * interval-uniform: Gauss–Legendre;
    /// * disk / bidisk area: Gauss–Legendre in `s = r²` (`resolution` nodes)
    ///   times `2·resolution + 1` equispaced angles, per factor.
    pub fn build(name: MeasureName, resolution: usize) -> Result<Self, MeasureError> {
        if resolution < MIN_RESOLUTION {
            return Err(MeasureError::ResolutionTooSmall {
                got: resolution,
                min: MIN_RESOLUTION,
            });
        }
        let (nodes, weights) = match name {
            MeasureName::UnitCircleArc => circle_rule(resolution),
            MeasureName::IntervalArcsine => {
                let w = 1.0 / resolution as f64;
                let nodes = chebyshev_nodes(resolution)
                    .into_iter()
                    .map(|x| C64::new(x, 0.0))
                    .collect();
                (nodes, alloc::vec![w; resolution])
            }
            MeasureName::IntervalUniform => {
                let (x, w) = gauss_legendre(resolution);
                (
                    x.into_iter().map(|x| C64::new(x, 0.0)).collect(),
                    w.into_iter().map(|w| 0.5 * w).collect(),
                )
            }
            MeasureName::UnitDiskArea => disk_rule(resolution),
            MeasureName::Torus2d => {
                let c = circle_rule(resolution);
                return Ok(product(&c, &c, MeasureName::Torus2d));
            }
            MeasureName::BidiskArea => {
                let d = disk_rule(resolution);
                return Ok(product(&d, &d, MeasureName::BidiskArea));
            }
            MeasureName::FubiniStudy => return Ok(fubini_study(1, resolution)),
            MeasureName::Custom => return Err(MeasureError::UnknownName("custom".to_string())),
        };
        Ok(QuadratureMeasure {
            dim: 1,
            nodes: nodes.into_iter().map(Point::one).collect(),
            weights,
            label: name,
        })
    }

    /// Builds the named rule with the resolution needed for Gram matrices of
    /// degree `degree`.
    pub fn for_degree(name: MeasureName, degree: u32) -> Result<Self, MeasureError> {
        if name == MeasureName::FubiniStudy {
            return Err(MeasureError::UnknownName("fubini-study".to_string()));
        }
        Self::build(name, name.resolution_for_degree(degree))
    }

    /// Fubini–Study probability measure on `C^m`, exact for
    /// `∫ |z^α|² (1+‖z‖²)^{-d} dμ` whenever `d ≤ 2·resolution − 1`.
    pub fn fubini_study(dim: usize, resolution: usize) -> Result<Self, MeasureError> {
        if dim != 1 && dim != 2 {
            return Err(MeasureError::BadDimension(dim));
        }
        if resolution < MIN_RESOLUTION {
            return Err(MeasureError::ResolutionTooSmall {
                got: resolution,
                min: MIN_RESOLUTION,
            });
        }
        Ok(fubini_study(dim, resolution))
    }

    /// A user supplied measure. Weights must be positive and sum to `mass`.
    pub fn custom(dim: usize, nodes: Vec<Point>, weights: Vec<f64>, mass: f64) -> Result<Self, MeasureError> {
        if dim != 1 && dim != 2 {
            return Err(MeasureError::BadDimension(dim));
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(MeasureError::LengthMismatch {
                nodes: nodes.len(),
                weights: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(MeasureError::NonPositiveWeight { index });
        }
        let total: f64 = weights.iter().sum();
        if (total - mass).abs() > MASS_TOLERANCE * mass.abs().max(1.0) {
            return Err(MeasureError::MassMismatch {
                got: total,
                expected: mass,
            });
        }
        Ok(QuadratureMeasure {
            dim,
            nodes,
            weights,
            label: MeasureName::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> MeasureName {
        self.label
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest node norm; all zeros of the orthonormal ensembles concentrate
    /// near the support.
    pub fn support_radius(&self) -> f64 {
        self.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// `Σ_j w_j f(x_j)`.
    pub fn integrate<F>(&self, f: F) -> Result<C64, MeasureError>
    where
        F: Fn(&Point) -> C64,
    {
        let mut acc = C64::new(0.0, 0.0);
        for (index, (p, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let v = f(p);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(MeasureError::NonFinite { index });
            }
            acc += v * *w;
        }
        Ok(acc)
    }

    /// Returns a copy whose weights are multiplied by `factor(x_j)`.
    ///
    /// Used for weighted inner products `∫ f ḡ w^{2N} dμ`; nodes where the
    /// factor underflows to zero are dropped.
    pub fn reweighted<F>(&self, factor: F) -> QuadratureMeasure
    where
        F: Fn(&Point) -> f64,
    {
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut weights = Vec::with_capacity(self.nodes.len());
        for (p, w) in self.nodes.iter().zip(&self.weights) {
            let v = w * factor(p);
            if v > 0.0 && v.is_finite() {
                nodes.push(*p);
                weights.push(v);
            }
        }
        QuadratureMeasure {
            dim: self.dim,
            nodes,
            weights,
            label: self.label,
        }
    }
}

fn circle_rule(n: usize) -> (Vec<C64>, Vec<f64>) {
    let w = 1.0 / n as f64;
    let nodes = (0..n)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect();
    (nodes, alloc::vec![w; n])
}

fn disk_rule(n: usize) -> (Vec<C64>, Vec<f64>) {
    let (s, ws) = gauss_legendre(n);
    let nt = 2 * n + 1;
    let mut nodes = Vec::with_capacity(n * nt);
    let mut weights = Vec::with_capacity(n * nt);
    for (si, wi) in s.iter().zip(&ws) {
        // s ∈ [0,1], dA/π = ds dθ/2π
        let r = (0.5 * (si + 1.0)).sqrt();
        for k in 0..nt {
            nodes.push(C64::from_polar(r, 2.0 * PI * k as f64 / nt as f64));
            weights.push(0.5 * wi / nt as f64);
        }
    }
    (nodes, weights)
}

fn product(a: &(Vec<C64>, Vec<f64>), b: &(Vec<C64>, Vec<f64>), label: MeasureName) -> QuadratureMeasure {
    let mut nodes = Vec::with_capacity(a.0.len() * b.0.len());
    let mut weights = Vec::with_capacity(a.0.len() * b.0.len());
    for (z, wz) in a.0.iter().zip(&a.1) {
        for (w, ww) in b.0.iter().zip(&b.1) {
            nodes.push(Point::two(*z, *w));
            weights.push(wz * ww);
        }
    }
    QuadratureMeasure {
        dim: 2,
        nodes,
        weights,
        label,
    }
}

/// Fubini–Study probability measure through the moment-map substitution:
/// `s_j = |z_j|²/(1+‖z‖²)` is uniform on the standard simplex and the angles
/// are uniform.
fn fubini_study(dim: usize, n: usize) -> QuadratureMeasure {
    let (g, gw) = gauss_legendre(n);
    let nt = 2 * n + 1;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    if dim == 1 {
        for (x, wx) in g.iter().zip(&gw) {
            let s = 0.5 * (x + 1.0);
            let r = (s / (1.0 - s)).sqrt();
            for k in 0..nt {
                nodes.push(Point::one(C64::from_polar(r, 2.0 * PI * k as f64 / nt as f64)));
                weights.push(0.5 * wx / nt as f64);
            }
        }
    } else {
        // Duffy map of the simplex: s = u, t = (1-u) v, density 2 (area 1/2).
        for (x, wx) in g.iter().zip(&gw) {
            let u = 0.5 * (x + 1.0);
            for (y, wy) in g.iter().zip(&gw) {
                let v = 0.5 * (y + 1.0);
                let s = u;
                let t = (1.0 - u) * v;
                let rest = 1.0 - s - t;
                let rz = (s / rest).sqrt();
                let rw = (t / rest).sqrt();
                let base = 2.0 * 0.25 * wx * wy * (1.0 - u);
                for a in 0..nt {
                    for b in 0..nt {
                        nodes.push(Point::two(
                            C64::from_polar(rz, 2.0 * PI * a as f64 / nt as f64),
                            C64::from_polar(rw, 2.0 * PI * b as f64 / nt as f64),
                        ));
                        weights.push(base / (nt * nt) as f64);
                    }
                }
            }
        }
    }
    QuadratureMeasure {
        dim,
        nodes,
        weights,
        label: MeasureName::FubiniStudy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::powi;

    #[test]
    fn circle_nodes_and_first_moment() {
        let mu = QuadratureMeasure::build(MeasureName::UnitCircleArc, 64).unwrap();
        assert_eq!(mu.len(), 64);
        assert!(mu.weights().iter().all(|w| *w == 1.0 / 64.0));
        let m1 = mu.integrate(|p| p.z).unwrap();
        assert!(m1.norm() < 1e-15);
        let one = mu.integrate(|_| C64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 1.0).abs() < 1e-15);
        let zz = mu.integrate(|p| p.z * p.z.conj()).unwrap();
        assert!((zz.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn arcsine_moments() {
        let mu = QuadratureMeasure::build(MeasureName::IntervalArcsine, 32).unwrap();
        let first = mu.nodes()[0].z.re;
        assert!((first - (PI / 64.0).cos()).abs() < 1e-15);
        let m2 = mu.integrate(|p| p.z * p.z).unwrap();
        assert!((m2.re - 0.5).abs() < 1e-14);
        let m4 = mu.integrate(|p| powi(p.z, 4)).unwrap();
        assert!((m4.re - 0.375).abs() < 1e-14);
    }

    #[test]
    fn torus_has_unit_mass() {
        let mu = QuadratureMeasure::build(MeasureName::Torus2d, 16).unwrap();
        assert_eq!(mu.len(), 256);
        assert_eq!(mu.dim(), 2);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_named_measures_are_probability_measures() {
        for name in MeasureName::NAMED {
            let mu = QuadratureMeasure::build(name, 8).unwrap();
            assert!((mu.total_mass() - 1.0).abs() < MASS_TOLERANCE, "{name}");
            assert!(mu.weights().iter().all(|w| *w > 0.0));
        }
        for dim in [1, 2] {
            let mu = QuadratureMeasure::fubini_study(dim, 6).unwrap();
            assert!((mu.total_mass() - 1.0).abs() < MASS_TOLERANCE);
        }
    }

    #[test]
    fn disk_area_moments() {
        // ∫ |z|^{2a} dA/π = 1/(a+1)
        let mu = QuadratureMeasure::build(MeasureName::UnitDiskArea, 8).unwrap();
        for a in 0..8u32 {
            let m = mu.integrate(|p| C64::new(p.z.norm_sqr().powi(a as i32), 0.0)).unwrap();
            assert!((m.re - 1.0 / (a as f64 + 1.0)).abs() < 1e-14);
        }
        let off = mu.integrate(|p| powi(p.z, 3) * powi(p.z.conj(), 1)).unwrap();
        assert!(off.norm() < 1e-15);
    }

    #[test]
    fn fubini_study_moments() {
        // |z|^{2j}(1+|z|²)^{-N} = s^j (1-s)^{N-j}, whose integral is j!(N-j)!/(N+1)!
        let mu = QuadratureMeasure::fubini_study(1, 6).unwrap();
        let v = mu
            .integrate(|p| C64::new(p.z.norm_sqr() / (1.0 + p.z.norm_sqr()).powi(3), 0.0))
            .unwrap();
        assert!((v.re - 2.0 / 24.0).abs() < 1e-14);
        let mu = QuadratureMeasure::fubini_study(2, 6).unwrap();
        // s t (1-s-t) over the simplex with density 2: 2 · 1!1!1!/5! = 1/60
        let v = mu
            .integrate(|p| {
                let q = 1.0 + p.norm_sqr();
                C64::new(p.z.norm_sqr() * p.w.norm_sqr() / (q * q * q), 0.0)
            })
            .unwrap();
        assert!((v.re - 1.0 / 60.0).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert_eq!(
            QuadratureMeasure::build(MeasureName::UnitCircleArc, 3),
            Err(MeasureError::ResolutionTooSmall { got: 3, min: 4 })
        );
        assert!(matches!(
            "nope".parse::<MeasureName>(),
            Err(MeasureError::UnknownName(_))
        ));
        let mu = QuadratureMeasure::build(MeasureName::UnitCircleArc, 8).unwrap();
        assert_eq!(
            mu.integrate(|_| C64::new(f64::NAN, 0.0)),
            Err(MeasureError::NonFinite { index: 0 })
        );
        assert!(matches!(
            QuadratureMeasure::custom(1, alloc::vec![Point::ORIGIN], alloc::vec![0.5], 1.0),
            Err(MeasureError::MassMismatch { .. })
        ));
        assert!(matches!(
            QuadratureMeasure::custom(1, alloc::vec![Point::ORIGIN], alloc::vec![-1.0], -1.0),
            Err(MeasureError::NonPositiveWeight { index: 0 })
        ));
    }

    #[test]
    fn names_round_trip() {
        for name in MeasureName::NAMED {
            assert_eq!(name.as_str().parse::<MeasureName>().unwrap(), name);
        }
    }
}
