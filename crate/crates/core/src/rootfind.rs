//! Zero sets of polynomial systems with as many equations as unknowns.
//!
//! Univariate roots come from Aberth–Ehrlich iteration; bivariate systems
//! are reduced to one variable with the Sylvester resultant, whose
//! coefficients are recovered by evaluation at roots of unity.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::linalg::{determinant, random_unitary, solve2, Matrix};
use crate::rng::{uniform, StreamKey};
use crate::{Point, C64};

pub const MAX_SWEEPS: u32 = 500;
pub const MAX_BIVARIATE_DEGREE: usize = 20;
/// Relative distance below which univariate roots are clustered.
pub const CLUSTER_TOLERANCE: f64 = 1e-7;
/// Backward-relative residual accepted for bivariate points.
pub const ACCEPT_RESIDUAL: f64 = 1e-8;
const PAIR_TOLERANCE: f64 = 1e-6;
const STEP_TOLERANCE: f64 = 1e-13;
const POLISH_STEPS: usize = 5;
const SHEAR_ATTEMPTS: u32 = 3;
/// Dilations of the resultant sampling circle tried after the unit circle.
const SAMPLING_RADII: [f64; 8] = [0.5, 2.0, 0.25, 4.0, 0.125, 8.0, 0.0625, 16.0];
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("Aberth iteration did not converge in {} sweeps", MAX_SWEEPS)]
    NoConvergence(Box<ZeroSet>),
    #[error("total degree {degree} exceeds the bivariate limit {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("resultant vanished identically in {attempts} shear attempts (common component)")]
    ResultantVanishes { attempts: u32 },
}

/// Evaluation of a univariate polynomial together with `Σ |c_k| |f_k(z)|`,
/// the scale used for backward-relative residuals. All three fields may
/// carry a common positive factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnivariateEval {
    pub value: C64,
    pub derivative: C64,
    pub abs_scale: f64,
}

impl UnivariateEval {
    pub fn relative_residual(&self) -> f64 {
        if self.abs_scale > 0.0 {
            self.value.norm() / self.abs_scale
        } else {
            0.0
        }
    }
}

/// A univariate polynomial as seen by the root finder.
pub trait Univariate {
    fn degree(&self) -> usize;

    fn eval(&self, z: C64) -> UnivariateEval;

    /// Newton correction `p(z)/p'(z)` (`None` where `p'` vanishes) and the
    /// backward-relative residual at `z`.
    fn newton(&self, z: C64) -> (Option<C64>, f64) {
        let e = self.eval(z);
        let ratio = if e.derivative.norm() > 0.0 {
            Some(e.value / e.derivative)
        } else {
            None
        };
        (ratio, e.relative_residual())
    }

    fn initial_guesses(&self) -> Vec<C64>;

    /// Roots at the origin removed before iteration.
    fn zero_roots(&self) -> usize {
        0
    }
}

/// `n` points on the circle of radius `r`, rotated off the real axis.
pub fn circle_guesses(n: usize, r: f64) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect()
}

/// Polynomial in the monomial basis, `Σ a_k z^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialPoly {
    /// Nonzero constant and leading coefficients after trimming.
    coeffs: Vec<C64>,
    zero_roots: usize,
}

impl MonomialPoly {
    /// Trims zero coefficients at both ends (low-order zeros become roots at
    /// the origin) and rescales by a power of two so that the largest
    /// coefficient has modulus in `[1, 2)`.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        let zero = C64::new(0.0, 0.0);
        while coeffs.last() == Some(&zero) {
            coeffs.pop();
        }
        let zero_roots = coeffs.iter().position(|c| *c != zero).unwrap_or(0);
        coeffs.drain(..zero_roots);
        let big = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if big > 0.0 && big.is_finite() {
            let e = big.log2().floor() as i32;
            let s = 2f64.powi(-e);
            for c in coeffs.iter_mut() {
                *c *= s;
            }
        }
        MonomialPoly { coeffs, zero_roots }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn horner(a: impl DoubleEndedIterator<Item = C64> + Clone, z: C64) -> UnivariateEval {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        let r = z.norm();
        for c in a.rev() {
            dp = dp * z + p;
            p = p * z + c;
            abs = abs * r + c.norm();
        }
        UnivariateEval {
            value: p,
            derivative: dp,
            abs_scale: abs,
        }
    }

    /// Upper convex hull of `(k, ln|a_k|)`: each edge of slope `-ln r`
    /// carries as many roots as its width, near radius `r`.
    fn newton_polygon_radii(&self) -> Vec<(usize, f64)> {
        let pts: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| (k as f64, c.norm().ln()))
            .collect();
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.windows(2)
            .map(|w| {
                let width = (w[1].0 - w[0].0) as usize;
                let r = ((w[0].1 - w[1].1) / (w[1].0 - w[0].0)).exp();
                (width, r)
            })
            .collect()
    }
}

impl Univariate for MonomialPoly {
    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn eval(&self, z: C64) -> UnivariateEval {
        Self::horner(self.coeffs.iter().copied(), z)
    }

    fn newton(&self, z: C64) -> (Option<C64>, f64) {
        if z.norm() <= 1.0 {
            let e = self.eval(z);
            let ratio = (e.derivative.norm() > 0.0).then(|| e.value / e.derivative);
            return (ratio, e.relative_residual());
        }
        // q(y) = y^D p(1/y) keeps Horner bounded outside the unit disk
        let y = z.inv();
        let d = self.degree() as f64;
        let e = Self::horner(self.coeffs.iter().rev().copied(), y);
        let denom = e.value * d - y * e.derivative;
        let ratio = (denom.norm() > 0.0).then(|| z * e.value / denom);
        (ratio, e.relative_residual())
    }

    fn initial_guesses(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.degree());
        for (edge, (width, r)) in self.newton_polygon_radii().into_iter().enumerate() {
            let offset = GOLDEN_ANGLE * (edge + 1) as f64;
            for j in 0..width {
                out.push(C64::from_polar(r, 2.0 * PI * j as f64 / width as f64 + offset));
            }
        }
        out
    }

    fn zero_roots(&self) -> usize {
        self.zero_roots
    }
}

/// Solver bookkeeping attached to a zero set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverDiagnostics {
    pub iterations: u32,
    pub converged: bool,
    /// Unitary change of coordinates applied before elimination.
    pub shear: Option<[[C64; 2]; 2]>,
    pub attempts: u32,
    /// Generic root count (degree, or mixed area for systems).
    pub expected: usize,
}

/// Simultaneous zeros in `C^m`, counted with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub dim: usize,
    pub points: Vec<Point>,
    /// Backward-relative residual per point (max over the system).
    pub residuals: Vec<f64>,
    /// Size of the cluster each point belongs to.
    pub multiplicity: Vec<u32>,
    pub diagnostics: SolverDiagnostics,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity.iter().all(|m| *m == 1)
    }

    /// True when the number of points equals the generic count.
    pub fn is_complete(&self) -> bool {
        self.points.len() == self.diagnostics.expected
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Roots of `Σ coeffs[k] z^k`.
pub fn roots_univariate(coeffs: &[C64]) -> Result<ZeroSet, RootError> {
    let p = MonomialPoly::new(coeffs.to_vec());
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    roots_of(&p)
}

/// Aberth–Ehrlich in Gauss–Seidel order on any [`Univariate`].
pub fn roots_of<P: Univariate + ?Sized>(p: &P) -> Result<ZeroSet, RootError> {
    let n = p.degree();
    let mut z = p.initial_guesses();
    z.truncate(n);
    while z.len() < n {
        z.push(C64::from_polar(1.0, GOLDEN_ANGLE * z.len() as f64));
    }
    let floor = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
    let mut done = vec![false; n];
    let mut residual = vec![f64::INFINITY; n];
    let mut sweeps = 0;
    let mut converged = n == 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        converged = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, res) = p.newton(z[i]);
            residual[i] = res;
            if res <= floor {
                done[i] = true;
                continue;
            }
            let Some(ratio) = ratio else {
                // stationary point: nudge off it
                let nudge = C64::from_polar(1e-3 * z[i].norm().max(1e-3), GOLDEN_ANGLE * (i + 1) as f64);
                z[i] += nudge;
                converged = false;
                continue;
            };
            let s: C64 = (0..n).filter(|j| *j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let denom = C64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() > 0.0 && denom.is_finite() {
                ratio / denom
            } else {
                ratio
            };
            z[i] -= step;
            if step.norm() <= STEP_TOLERANCE * z[i].norm() {
                done[i] = true;
                residual[i] = p.newton(z[i]).1;
            } else {
                converged = false;
            }
        }
    }
    let zr = p.zero_roots();
    let mut roots = Vec::with_capacity(n + zr);
    for _ in 0..zr {
        roots.push(C64::new(0.0, 0.0));
        residual.push(0.0);
    }
    roots.splice(0..0, z);
    let multiplicity = cluster(&roots);
    let set = ZeroSet {
        dim: 1,
        points: roots.into_iter().map(Point::one).collect(),
        residuals: residual,
        multiplicity,
        diagnostics: SolverDiagnostics {
            iterations: sweeps,
            converged,
            shear: None,
            attempts: 1,
            expected: n + zr,
        },
    };
    if converged {
        Ok(set)
    } else {
        Err(RootError::NoConvergence(Box::new(set)))
    }
}

fn cluster(roots: &[C64]) -> Vec<u32> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() < CLUSTER_TOLERANCE * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let roots_of: Vec<usize> = (0..n).map(|i| find(&mut label, i)).collect();
    roots_of
        .iter()
        .map(|r| roots_of.iter().filter(|s| *s == r).count() as u32)
        .collect()
}

/// Bivariate polynomial `Σ t[a][b] z^a w^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    table: Vec<Vec<C64>>,
}

impl BivariatePoly {
    pub fn from_table(table: Vec<Vec<C64>>) -> Self {
        BivariatePoly { table }
    }

    /// From `(exponent, coefficient)` terms.
    pub fn from_terms(terms: &[([u32; 2], C64)]) -> Self {
        let da = terms.iter().map(|t| t.0[0]).max().unwrap_or(0) as usize;
        let db = terms.iter().map(|t| t.0[1]).max().unwrap_or(0) as usize;
        let mut table = vec![vec![C64::new(0.0, 0.0); db + 1]; da + 1];
        for (e, c) in terms {
            table[e[0] as usize][e[1] as usize] += *c;
        }
        BivariatePoly { table }
    }

    pub fn table(&self) -> &[Vec<C64>] {
        &self.table
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.table
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, c)| (a, b, *c)))
            .filter(|t| t.2 != C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn total_degree(&self) -> usize {
        self.terms().map(|(a, b, _)| a + b).max().unwrap_or(0)
    }

    fn degree_in(&self, var: usize) -> usize {
        self.terms()
            .map(|(a, b, _)| if var == 0 { a } else { b })
            .max()
            .unwrap_or(0)
    }

    fn support(&self) -> Vec<[i64; 2]> {
        self.terms().map(|(a, b, _)| [a as i64, b as i64]).collect()
    }

    pub fn conj(&self) -> Self {
        BivariatePoly {
            table: self
                .table
                .iter()
                .map(|r| r.iter().map(|c| c.conj()).collect())
                .collect(),
        }
    }

    /// Value, gradient and `Σ |t_ab| |z|^a |w|^b`.
    pub fn eval_grad(&self, p: &Point) -> (C64, C64, C64, f64) {
        let (rz, rw) = (p.z.norm(), p.w.norm());
        let mut v = C64::new(0.0, 0.0);
        let mut dz = C64::new(0.0, 0.0);
        let mut dw = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        for row in self.table.iter().rev() {
            let mut r = C64::new(0.0, 0.0);
            let mut dr = C64::new(0.0, 0.0);
            let mut ar = 0.0;
            for c in row.iter().rev() {
                dr = dr * p.w + r;
                r = r * p.w + c;
                ar = ar * rw + c.norm();
            }
            dz = dz * p.z + v;
            v = v * p.z + r;
            dw = dw * p.z + dr;
            abs = abs * rz + ar;
        }
        (v, dz, dw, abs)
    }

    pub fn eval(&self, p: &Point) -> C64 {
        self.eval_grad(p).0
    }

    fn relative_residual(&self, p: &Point) -> f64 {
        let (v, _, _, abs) = self.eval_grad(p);
        if abs > 0.0 {
            v.norm() / abs
        } else {
            v.norm()
        }
    }

    /// Coefficients in `w` of `f(z, ·)`.
    fn in_w_at(&self, z: C64, len: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); len];
        for row in self.table.iter().rev() {
            for (o, c) in out
                .iter_mut()
                .zip(row.iter().chain(core::iter::repeat(&C64::new(0.0, 0.0))))
            {
                *o = *o * z + c;
            }
        }
        // Horner above multiplies all columns uniformly in z
        out
    }

    /// `f(M x)` for a 2×2 matrix `M`.
    pub fn linear_substitution(&self, m: &[[C64; 2]; 2]) -> Self {
        let d = self.total_degree();
        // powers of the linear forms as homogeneous coefficient vectors
        // (entry i = coefficient of z^{k-i} w^i)
        let powers = |row: [C64; 2]| -> Vec<Vec<C64>> {
            let mut out = vec![vec![C64::new(1.0, 0.0)]];
            for k in 1..=d {
                let prev = &out[k - 1];
                let mut next = vec![C64::new(0.0, 0.0); k + 1];
                for (i, c) in prev.iter().enumerate() {
                    next[i] += c * row[0];
                    next[i + 1] += c * row[1];
                }
                out.push(next);
            }
            out
        };
        let lz = powers(m[0]);
        let lw = powers(m[1]);
        let mut table = vec![vec![C64::new(0.0, 0.0); d + 1]; d + 1];
        for (a, b, c) in self.terms() {
            for (i, x) in lz[a].iter().enumerate() {
                let cx = c * x;
                for (j, y) in lw[b].iter().enumerate() {
                    let k = a + b;
                    let wpow = i + j;
                    table[k - wpow][wpow] += cx * y;
                }
            }
        }
        BivariatePoly { table }
    }
}

fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn hull_area2(pts: &[[i64; 2]]) -> i64 {
    let mut p = pts.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() < 3 {
        return 0;
    }
    let mut h: Vec<[i64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[i64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for q in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], *q) <= 0 {
                h.pop();
            }
            h.push(*q);
        }
        h.pop();
    }
    let n = h.len();
    (0..n)
        .map(|i| h[i][0] * h[(i + 1) % n][1] - h[(i + 1) % n][0] * h[i][1])
        .sum::<i64>()
        .abs()
}

/// Mixed area `MV(P, Q) = area(P + Q) − area(P) − area(Q)` of the Newton
/// polygons: the generic number of common zeros.
pub fn mixed_area(f1: &BivariatePoly, f2: &BivariatePoly) -> usize {
    let p = f1.support();
    let q = f2.support();
    let sum: Vec<[i64; 2]> = p
        .iter()
        .flat_map(|a| q.iter().map(move |b| [a[0] + b[0], a[1] + b[1]]))
        .collect();
    let twice = hull_area2(&sum) - hull_area2(&p) - hull_area2(&q);
    (twice / 2) as usize
}

fn sylvester_det(a: &[C64], b: &[C64]) -> C64 {
    let (ea, eb) = (a.len() - 1, b.len() - 1);
    let n = ea + eb;
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut m: Matrix = vec![vec![C64::new(0.0, 0.0); n]; n];
    for r in 0..eb {
        for (k, c) in a.iter().rev().enumerate() {
            m[r][r + k] = *c;
        }
    }
    for r in 0..ea {
        for (k, c) in b.iter().rev().enumerate() {
            m[eb + r][r + k] = *c;
        }
    }
    determinant(m)
}

/// Common zeros of two bivariate polynomials.
///
/// Dense systems are first sheared by a random unitary drawn from `key`
/// so that the resultant has full degree `d₁d₂`; when the unsheared
/// Sylvester degree bound is already smaller (sparse Newton polygons) the
/// coordinates are only rotated by a random diagonal unitary.
pub fn roots_bivariate(f1: &BivariatePoly, f2: &BivariatePoly, key: StreamKey) -> Result<ZeroSet, RootError> {
    if f1.is_zero() || f2.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let (d1, d2) = (f1.total_degree(), f2.total_degree());
    for d in [d1, d2] {
        if d > MAX_BIVARIATE_DEGREE {
            return Err(RootError::DegreeTooHigh {
                degree: d,
                max: MAX_BIVARIATE_DEGREE,
            });
        }
    }
    let expected = mixed_area(f1, f2);
    let plain_bound = f2.degree_in(1) * f1.degree_in(0) + f1.degree_in(1) * f2.degree_in(0);
    let shear_full = plain_bound > d1 * d2;
    let mut best: Option<ZeroSet> = None;
    let mut vanished = 0;
    for attempt in 0..SHEAR_ATTEMPTS {
        let k = StreamKey::new(key.seed, key.trial, key.lane.wrapping_add(1 + attempt as u64));
        let m = if shear_full {
            let u = random_unitary(2, k);
            [[u[0][0], u[0][1]], [u[1][0], u[1][1]]]
        } else {
            let mut rng = k.rng();
            let a = C64::from_polar(1.0, 2.0 * PI * uniform(&mut rng));
            let b = C64::from_polar(1.0, 2.0 * PI * uniform(&mut rng));
            [[a, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), b]]
        };
        let bound = if shear_full { d1 * d2 } else { plain_bound };
        match solve_sheared(f1, f2, &m, bound, 1.0) {
            None => vanished += 1,
            Some(mut set) => {
                // roots far from the unit circle are resolved by dilated
                // samplings of the resultant
                for radius in SAMPLING_RADII {
                    if set.len() >= expected {
                        break;
                    }
                    if let Some(extra) = solve_sheared(f1, f2, &m, bound, radius) {
                        merge_points(&mut set, extra);
                    }
                }
                set.diagnostics.shear = Some(m);
                set.diagnostics.attempts = attempt + 1;
                set.diagnostics.expected = expected;
                let better = best.as_ref().is_none_or(|b| set.len() > b.len());
                let complete = set.len() >= expected;
                if better {
                    best = Some(set);
                }
                if complete {
                    break;
                }
            }
        }
    }
    match best {
        Some(mut set) => {
            set.diagnostics.attempts = set.diagnostics.attempts.max(vanished + 1).min(SHEAR_ATTEMPTS);
            Ok(set)
        }
        None => Err(RootError::ResultantVanishes { attempts: vanished }),
    }
}

fn merge_points(set: &mut ZeroSet, extra: ZeroSet) {
    set.diagnostics.iterations += extra.diagnostics.iterations;
    for (p, r) in extra.points.into_iter().zip(extra.residuals) {
        if !set
            .points
            .iter()
            .any(|q| q.dist_max(&p) <= PAIR_TOLERANCE * p.norm().max(1.0))
        {
            set.points.push(p);
            set.residuals.push(r);
            set.multiplicity.push(1);
        }
    }
}

fn apply(m: &[[C64; 2]; 2], p: &Point) -> Point {
    Point::two(m[0][0] * p.z + m[0][1] * p.w, m[1][0] * p.z + m[1][1] * p.w)
}

fn solve_sheared(
    f1: &BivariatePoly,
    f2: &BivariatePoly,
    m: &[[C64; 2]; 2],
    bound: usize,
    radius: f64,
) -> Option<ZeroSet> {
    let g1 = f1.linear_substitution(m);
    let g2 = f2.linear_substitution(m);
    let (e1, e2) = (g1.degree_in(1), g2.degree_in(1));
    let pts = bound + 1;
    // resultant of the dilated system sampled at roots of unity, then
    // inverse DFT: coefficients of R(radius·u)
    let samples: Vec<C64> = (0..pts)
        .map(|k| {
            let z = C64::from_polar(radius, 2.0 * PI * k as f64 / pts as f64);
            sylvester_det(&g1.in_w_at(z, e1 + 1), &g2.in_w_at(z, e2 + 1))
        })
        .collect();
    let res: Vec<C64> = (0..pts)
        .map(|j| {
            let s: C64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * ((j * k) % pts) as f64 / pts as f64))
                .sum();
            s / pts as f64
        })
        .collect();
    let big = res.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(big > 1e-13 * scale.max(f64::MIN_POSITIVE)) || big == 0.0 {
        return None;
    }
    // interpolation noise in the top coefficients would create spurious
    // roots near infinity
    let mut trimmed = res;
    while trimmed.len() > 1 && trimmed.last().is_some_and(|c| c.norm() <= 1e-11 * big) {
        trimmed.pop();
    }
    let zs = match roots_of(&MonomialPoly::new(trimmed)) {
        Ok(s) => s,
        Err(RootError::NoConvergence(s)) => *s,
        Err(_) => return None,
    };
    let mut points: Vec<Point> = Vec::new();
    let mut residuals = Vec::new();
    let mut iterations = zs.diagnostics.iterations;
    for zp in &zs.points {
        let z = zp.z * radius;
        let w1 = univariate_roots_loose(&g1.in_w_at(z, e1 + 1), &mut iterations);
        let w2 = univariate_roots_loose(&g2.in_w_at(z, e2 + 1), &mut iterations);
        // an equation constant in w constrains nothing at this z
        let candidates: Vec<C64> = if w1.is_empty() || w2.is_empty() {
            w1.iter().chain(&w2).copied().collect()
        } else {
            let mut pair: Option<(f64, C64)> = None;
            for a in &w1 {
                for b in &w2 {
                    let d = (a - b).norm() / a.norm().max(1.0);
                    if pair.is_none_or(|(best, _)| d < best) {
                        pair = Some((d, (a + b) * 0.5));
                    }
                }
            }
            pair.map(|(_, w)| w).into_iter().collect()
        };
        for w in candidates {
            if let Some((p, r)) = polish(f1, f2, apply(m, &Point::two(z, w))) {
                let dup = points
                    .iter()
                    .any(|q: &Point| q.dist_max(&p) <= PAIR_TOLERANCE * p.norm().max(1.0));
                if !dup {
                    points.push(p);
                    residuals.push(r);
                }
            }
        }
    }
    let n = points.len();
    Some(ZeroSet {
        dim: 2,
        points,
        residuals,
        multiplicity: vec![1; n],
        diagnostics: SolverDiagnostics {
            iterations,
            converged: zs.diagnostics.converged,
            shear: None,
            attempts: 1,
            expected: 0,
        },
    })
}

/// Newton on the square system; `Some` when the backward-relative residual
/// is acceptable.
fn polish(f1: &BivariatePoly, f2: &BivariatePoly, mut p: Point) -> Option<(Point, f64)> {
    for _ in 0..POLISH_STEPS {
        let (v1, a1, b1, _) = f1.eval_grad(&p);
        let (v2, a2, b2, _) = f2.eval_grad(&p);
        let Some(step) = solve2([[a1, b1], [a2, b2]], [v1, v2]) else {
            break;
        };
        if !(step[0].is_finite() && step[1].is_finite()) {
            break;
        }
        p = Point::two(p.z - step[0], p.w - step[1]);
    }
    let r = f1.relative_residual(&p).max(f2.relative_residual(&p));
    (r <= ACCEPT_RESIDUAL && p.is_finite()).then_some((p, r))
}

fn univariate_roots_loose(coeffs: &[C64], iterations: &mut u32) -> Vec<C64> {
    let p = MonomialPoly::new(coeffs.to_vec());
    if p.is_zero() {
        return Vec::new();
    }
    let set = match roots_of(&p) {
        Ok(s) => s,
        Err(RootError::NoConvergence(s)) => *s,
        Err(_) => return Vec::new(),
    };
    *iterations += set.diagnostics.iterations;
    set.points.into_iter().map(|p| p.z).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_examples() {
        let r = roots_univariate(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let z = sorted(r.points.iter().map(|p| p.z).collect());
        assert!((z[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((z[1] - c(0.0, 1.0)).norm() < 1e-14);
        let r = roots_univariate(&[c(6.0, 0.0), c(-5.0, 0.0), c(1.0, 0.0)]).unwrap();
        let z = sorted(r.points.iter().map(|p| p.z).collect());
        assert!((z[0] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((z[1] - c(3.0, 0.0)).norm() < 1e-13);
        assert!(r.is_simple());
    }

    #[test]
    fn trimming_and_zero_roots() {
        let r = roots_univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.multiplicity.iter().filter(|m| **m == 2).count(), 2);
        assert_eq!(roots_univariate(&[c(0.0, 0.0); 3]), Err(RootError::ZeroPolynomial));
    }

    #[test]
    fn double_root_is_clustered() {
        // (z - 1)^2
        let r = roots_univariate(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!r.is_simple());
        assert!(r.points.iter().all(|p| (p.z - c(1.0, 0.0)).norm() < 1e-6));
    }

    #[test]
    fn wide_dynamic_range() {
        // roots 1e-6, 1, 1e6
        let coeffs = [
            c(-1.0, 0.0),
            c(1e6 + 1.0 + 1e-6, 0.0),
            c(-(1e6 + 1.0 + 1e-6), 0.0),
            c(1.0, 0.0),
        ];
        let r = roots_univariate(&coeffs).unwrap();
        let mut mags: Vec<f64> = r.points.iter().map(|p| p.z.norm()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mags[0] - 1e-6).abs() < 1e-15);
        assert!((mags[1] - 1.0).abs() < 1e-9);
        assert!((mags[2] - 1e6).abs() < 1e-3);
    }

    #[test]
    fn bivariate_linear_and_quadratic() {
        let f1 = BivariatePoly::from_terms(&[([1, 0], c(1.0, 0.0)), ([0, 0], c(-1.0, 0.0))]);
        let f2 = BivariatePoly::from_terms(&[([0, 1], c(1.0, 0.0)), ([0, 0], c(-2.0, 0.0))]);
        let s = roots_bivariate(&f1, &f2, StreamKey::new(1, 0, 0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.points[0].dist_max(&Point::two(c(1.0, 0.0), c(2.0, 0.0))) < 1e-12);

        let f1 = BivariatePoly::from_terms(&[([2, 0], c(1.0, 0.0)), ([0, 0], c(-1.0, 0.0))]);
        let f2 = BivariatePoly::from_terms(&[([0, 2], c(1.0, 0.0)), ([0, 0], c(-1.0, 0.0))]);
        let s = roots_bivariate(&f1, &f2, StreamKey::new(2, 0, 0)).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.is_complete());
        for p in &s.points {
            assert!((p.z.norm() - 1.0).abs() < 1e-10 && (p.w.norm() - 1.0).abs() < 1e-10);
            assert!(p.z.im.abs() < 1e-10 && p.w.im.abs() < 1e-10);
        }
    }

    #[test]
    fn mixed_area_examples() {
        let tri = BivariatePoly::from_terms(&[([0, 0], c(1.0, 0.0)), ([3, 0], c(1.0, 0.0)), ([0, 3], c(1.0, 0.0))]);
        assert_eq!(mixed_area(&tri, &tri), 9);
        let sq = BivariatePoly::from_terms(&[
            ([0, 0], c(1.0, 0.0)),
            ([2, 0], c(1.0, 0.0)),
            ([0, 2], c(1.0, 0.0)),
            ([2, 2], c(1.0, 0.0)),
        ]);
        assert_eq!(mixed_area(&sq, &sq), 8);
    }

    #[test]
    fn substitution_round_trip() {
        let f = BivariatePoly::from_terms(&[([2, 1], c(1.0, 0.5)), ([0, 3], c(-2.0, 0.0)), ([0, 0], c(0.3, 0.0))]);
        let m = [[c(0.6, 0.0), c(0.0, 0.8)], [c(0.0, 0.8), c(0.6, 0.0)]];
        let g = f.linear_substitution(&m);
        let p = Point::two(c(0.3, -0.7), c(1.1, 0.2));
        assert!((g.eval(&p) - f.eval(&apply(&m, &p))).norm() < 1e-13);
    }
}
