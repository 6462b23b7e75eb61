//! Uniform rectangular grids over windows in `C` (two real axes) and `C^2`
//! (four real axes).

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::{Point, C64};

pub const MIN_NODES: usize = 8;

/// One real axis: `n` equispaced nodes from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Axis { lo, hi, n }
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("axis {axis} has {nodes} nodes, need {MIN_NODES} and a nonempty range")]
pub struct GridError {
    pub axis: usize,
    pub nodes: usize,
}

/// Axes are ordered `Re z, Im z` (and `Re w, Im w` when `m = 2`); the last
/// axis varies fastest in the flattened index.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    dim: usize,
    axes: Vec<Axis>,
}

impl ComplexGrid {
    pub fn new(dim: usize, axes: Vec<Axis>) -> Result<Self, GridError> {
        assert_eq!(axes.len(), 2 * dim, "need two real axes per complex dimension");
        for (k, a) in axes.iter().enumerate() {
            if a.n < MIN_NODES || !(a.hi > a.lo) {
                return Err(GridError { axis: k, nodes: a.n });
            }
        }
        Ok(ComplexGrid { dim, axes })
    }

    /// The window `[-half, half]^{2m}` with `n` nodes per axis.
    pub fn square(dim: usize, half: f64, n: usize) -> Result<Self, GridError> {
        Self::new(dim, (0..2 * dim).map(|_| Axis::new(-half, half, n)).collect())
    }

    /// Square window centered at `center` (one variable).
    pub fn centered(center: C64, half: f64, n: usize) -> Result<Self, GridError> {
        Self::new(
            1,
            alloc::vec![
                Axis::new(center.re - half, center.re + half, n),
                Axis::new(center.im - half, center.im + half, n),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.axes[axis].spacing()
    }

    /// Volume of one cell (`h_x h_y` or its square).
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Same window with spacing halved along every axis.
    pub fn refined(&self) -> Self {
        ComplexGrid {
            dim: self.dim,
            axes: self.axes.iter().map(|a| Axis::new(a.lo, a.hi, 2 * a.n - 1)).collect(),
        }
    }

    /// Same window with spacing doubled; requires odd node counts.
    pub fn coarsened(&self) -> Option<Self> {
        if self.axes.iter().any(|a| a.n % 2 == 0 || a.n.div_ceil(2) < MIN_NODES) {
            return None;
        }
        Some(ComplexGrid {
            dim: self.dim,
            axes: self
                .axes
                .iter()
                .map(|a| Axis::new(a.lo, a.hi, a.n.div_ceil(2)))
                .collect(),
        })
    }

    pub fn strides(&self) -> [usize; 4] {
        let mut s = [0; 4];
        let mut acc = 1;
        for k in (0..self.axes.len()).rev() {
            s[k] = acc;
            acc *= self.axes[k].n;
        }
        s
    }

    pub fn unflatten(&self, mut index: usize) -> [usize; 4] {
        let mut out = [0; 4];
        for k in (0..self.axes.len()).rev() {
            out[k] = index % self.axes[k].n;
            index /= self.axes[k].n;
        }
        out
    }

    pub fn flatten(&self, multi: [usize; 4]) -> usize {
        let s = self.strides();
        (0..self.axes.len()).map(|k| multi[k] * s[k]).sum()
    }

    pub fn point_at(&self, multi: [usize; 4]) -> Point {
        let z = C64::new(self.axes[0].node(multi[0]), self.axes[1].node(multi[1]));
        if self.dim == 1 {
            Point::one(z)
        } else {
            Point::two(z, C64::new(self.axes[2].node(multi[2]), self.axes[3].node(multi[3])))
        }
    }

    pub fn point(&self, index: usize) -> Point {
        self.point_at(self.unflatten(index))
    }

    /// True when every coordinate index is at least `margin` away from the
    /// window boundary.
    pub fn is_interior(&self, multi: [usize; 4], margin: usize) -> bool {
        (0..self.axes.len()).all(|k| multi[k] >= margin && multi[k] + margin < self.axes[k].n)
    }

    /// Nearest node multi-index of `p`, if inside the window.
    pub fn locate(&self, p: &Point) -> Option<[usize; 4]> {
        let coords = [p.z.re, p.z.im, p.w.re, p.w.im];
        let mut out = [0; 4];
        for (k, a) in self.axes.iter().enumerate() {
            let t = (coords[k] - a.lo) / a.spacing();
            let i = (t + 0.5).floor();
            if !(i >= 0.0 && i < a.n as f64) {
                return None;
            }
            out[k] = i as usize;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let g = ComplexGrid::square(2, 1.0, 9).unwrap();
        assert_eq!(g.len(), 9usize.pow(4));
        for idx in [0, 17, 4000, g.len() - 1] {
            assert_eq!(g.flatten(g.unflatten(idx)), idx);
        }
        let p = g.point_at([0, 8, 4, 4]);
        assert_eq!(p, Point::two(C64::new(-1.0, 1.0), C64::new(0.0, 0.0)));
        assert_eq!(g.locate(&p), Some([0, 8, 4, 4]));
    }

    #[test]
    fn too_few_nodes_rejected() {
        assert!(ComplexGrid::square(1, 1.0, 7).is_err());
        assert!(ComplexGrid::square(1, 1.0, 8).is_ok());
    }

    #[test]
    fn refine_and_coarsen() {
        let g = ComplexGrid::square(1, 2.0, 17).unwrap();
        let r = g.refined();
        assert!((r.spacing(0) - g.spacing(0) / 2.0).abs() < 1e-15);
        assert_eq!(r.coarsened().unwrap(), g);
    }
}
