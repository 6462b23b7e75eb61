//! Orthonormal polynomial bases and the Gaussian ensembles they induce.
//!
//! A [`PolynomialBasis`] is an orthonormal family `{S_j}` of polynomials over
//! a [`MonomialDictionary`]; a random section is `s = Σ c_j S_j` with
//! i.i.d. standard complex Gaussian `c_j` ([`sample`]).
//!
//! Bases are stored in one of three forms:
//!
//! * scaled monomials `S_j = σ_j z^{α_j}` (Kac, SU(m+1), polytope, and every
//!   orthonormalization whose result is diagonal);
//! * lower-triangular coefficient rows over the dictionary (two variables);
//! * a univariate Arnoldi recurrence `z q_j = Σ_{i ≤ j+1} H_{ij} q_i`, which
//!   spans the same flag of subspaces as Gram–Schmidt on `1, z, …, z^N` but
//!   stays accurate at degrees where monomial coefficients are meaningless.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float as _;

use crate::linalg::Matrix;
use crate::measures::{MeasureError, MeasureName, QuadratureMeasure};
use crate::quadrature::{ln_factorial, ln_multinomial};
use crate::rng::{complex_gaussian, StreamKey};
use crate::rootfind::{MonomialPoly, Univariate, UnivariateEval};
use crate::{Point, C64};

/// Gram matrices must be the identity to this accuracy.
pub const GRAM_TOLERANCE: f64 = 1e-8;

/// Relative residual norm below which a new basis direction is rejected
/// (Gram eigenvalue ratio 1e-10).
const SINGULAR_RATIO: f64 = 1e-5;

/// Loss of orthogonality that triggers the reorthogonalization pass.
const REORTH_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnsembleError {
    #[error("Gram matrix numerically singular at basis element {index} (condition number ≈ {condition:.3e})")]
    Singular { index: usize, condition: f64 },
    #[error("orthonormalization lost accuracy: Gram residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },
    #[error("polytope contains no lattice points")]
    EmptyPolytope,
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error("dictionary dimension {dict} does not match measure dimension {measure}")]
    DimensionMismatch { dict: usize, measure: usize },
    #[error("dictionary has more monomials ({monomials}) than quadrature nodes ({nodes})")]
    TooFewNodes { monomials: usize, nodes: usize },
    #[error("duplicate exponent {0:?} in dictionary")]
    DuplicateExponent([u32; 2]),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Exponents `α ∈ Z^m_{≥0}` in graded lexicographic order: by total degree,
/// then by decreasing first exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialDictionary {
    dim: usize,
    exps: Vec<[u32; 2]>,
}

fn graded_lex(a: &[u32; 2], b: &[u32; 2]) -> core::cmp::Ordering {
    (a[0] + a[1]).cmp(&(b[0] + b[1])).then(b[0].cmp(&a[0]))
}

impl MonomialDictionary {
    /// All monomials of total degree at most `degree`.
    pub fn total_degree(dim: usize, degree: u32) -> Self {
        let mut exps = Vec::new();
        for d in 0..=degree {
            if dim == 1 {
                exps.push([d, 0]);
            } else {
                for a in (0..=d).rev() {
                    exps.push([a, d - a]);
                }
            }
        }
        MonomialDictionary { dim, exps }
    }

    pub fn from_exponents(dim: usize, mut exps: Vec<[u32; 2]>) -> Result<Self, EnsembleError> {
        if dim != 1 && dim != 2 {
            return Err(EnsembleError::InvalidSpec(format!("dimension {dim}")));
        }
        if dim == 1 && exps.iter().any(|e| e[1] != 0) {
            return Err(EnsembleError::InvalidSpec(
                "second exponent in one variable".to_string(),
            ));
        }
        exps.sort_by(graded_lex);
        if let Some(w) = exps.windows(2).find(|w| w[0] == w[1]) {
            return Err(EnsembleError::DuplicateExponent(w[0]));
        }
        Ok(MonomialDictionary { dim, exps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[[u32; 2]] {
        &self.exps
    }

    /// Largest total degree in the dictionary.
    pub fn max_degree(&self) -> u32 {
        self.exps.iter().map(|e| e[0] + e[1]).max().unwrap_or(0)
    }

    /// Maximal exponent per coordinate.
    pub fn max_exponents(&self) -> [u32; 2] {
        let mut m = [0, 0];
        for e in &self.exps {
            m[0] = m[0].max(e[0]);
            m[1] = m[1].max(e[1]);
        }
        m
    }

    /// True when the dictionary is `1, z, …, z^N`.
    pub fn is_univariate_full(&self) -> bool {
        self.dim == 1 && self.exps.iter().enumerate().all(|(i, e)| e[0] as usize == i)
    }

    pub fn index_of(&self, exp: [u32; 2]) -> Option<usize> {
        self.exps.binary_search_by(|e| graded_lex(e, &exp)).ok()
    }
}

/// Hermitian metric on the line bundle in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `|s|_h = |f|`.
    Flat,
    /// `|s|_h = |f| (1 + ‖z‖²)^{-N/2}` on `O(N)`.
    FubiniStudy(u32),
}

impl Metric {
    /// `log` of the metric factor `|s|_h / |f|` at `p`.
    pub fn log_factor(&self, p: &Point) -> f64 {
        match self {
            Metric::Flat => 0.0,
            Metric::FubiniStudy(n) => -0.5 * *n as f64 * p.norm_sqr().ln_1p(),
        }
    }

    pub fn factor(&self, p: &Point) -> f64 {
        match self {
            Metric::Flat => 1.0,
            Metric::FubiniStudy(_) => self.log_factor(p).exp(),
        }
    }
}

/// Built-in weights for weighted ensembles `L²(w^{2N} dμ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightId {
    Constant,
    /// `w(z) = exp(-‖z‖²/2)`.
    GaussianRadial,
}

impl WeightId {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightId::Constant => "constant",
            WeightId::GaussianRadial => "gaussian-radial",
        }
    }

    /// `w(p)^{2·power}`.
    pub fn power_factor(&self, p: &Point, power: u32) -> f64 {
        match self {
            WeightId::Constant => 1.0,
            WeightId::GaussianRadial => (-(power as f64) * p.norm_sqr()).exp(),
        }
    }
}

impl FromStr for WeightId {
    type Err = EnsembleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(WeightId::Constant),
            "gaussian-radial" => Ok(WeightId::GaussianRadial),
            _ => Err(EnsembleError::InvalidSpec(format!("unknown weight `{s}`"))),
        }
    }
}

/// Univariate three-term-or-longer recurrence produced by Arnoldi.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    q0: f64,
    /// `sub[j] = H_{j+1, j} > 0`.
    sub: Vec<f64>,
    /// Nonzero `H_{i, j}` for `i ≤ j`.
    cols: Vec<Vec<(u32, C64)>>,
}

/// Power-of-two rescaling keeps long recurrences finite.
const RESCALE_AT: f64 = 1.6e150; // ≈ 2^499
const RESCALE_BY: f64 = 6.109_351_968_574_869e-151; // 2^-499

impl Recurrence {
    pub fn len(&self) -> usize {
        self.sub.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of nonzero entries above the subdiagonal.
    pub fn bandwidth(&self) -> usize {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, _)| j - *i as usize + 1))
            .max()
            .unwrap_or(0)
    }

    fn values(&self, z: C64, out: &mut [C64]) {
        out[0] = C64::new(self.q0, 0.0);
        for j in 0..out.len() - 1 {
            let mut v = z * out[j];
            for (i, h) in &self.cols[j] {
                v -= h * out[*i as usize];
            }
            out[j + 1] = v / self.sub[j];
        }
    }

    /// `Σ c_j q_j(z)`, its derivative and `Σ |c_j||q_j(z)|`, all multiplied
    /// by a common power of two.
    fn series(&self, coeffs: &[C64], z: C64) -> (UnivariateEval, i32) {
        let n = coeffs.len();
        let mut q = vec![C64::new(0.0, 0.0); n];
        let mut dq = vec![C64::new(0.0, 0.0); n];
        q[0] = C64::new(self.q0, 0.0);
        let mut p = coeffs[0] * q[0];
        let mut dp = C64::new(0.0, 0.0);
        let mut abs = coeffs[0].norm() * self.q0;
        let mut lo = 0usize;
        let mut rescales = 0;
        for j in 0..n - 1 {
            let mut v = z * q[j];
            let mut dv = q[j] + z * dq[j];
            for (i, h) in &self.cols[j] {
                let i = *i as usize;
                v -= h * q[i];
                dv -= h * dq[i];
            }
            q[j + 1] = v / self.sub[j];
            dq[j + 1] = dv / self.sub[j];
            p += coeffs[j + 1] * q[j + 1];
            dp += coeffs[j + 1] * dq[j + 1];
            abs += coeffs[j + 1].norm() * q[j + 1].norm();
            if q[j + 1].norm().max(dq[j + 1].norm()) > RESCALE_AT {
                // only entries still referenced by later columns matter
                let keep_from = self.cols[j..]
                    .iter()
                    .flatten()
                    .map(|(i, _)| *i as usize)
                    .min()
                    .unwrap_or(j);
                lo = lo.max(keep_from.min(j));
                for k in lo..=j + 1 {
                    q[k] *= RESCALE_BY;
                    dq[k] *= RESCALE_BY;
                }
                p *= RESCALE_BY;
                dp *= RESCALE_BY;
                abs *= RESCALE_BY;
                rescales += 1;
            }
        }
        let e = UnivariateEval {
            value: p,
            derivative: dp,
            abs_scale: abs,
        };
        (e, rescales)
    }

    /// Expands `q_0 … q_{n-1}` into monomial coefficients (row `j` has
    /// length `n`). Only meaningful at moderate degree.
    pub fn monomial_rows(&self) -> Matrix {
        let n = self.len();
        let mut rows: Matrix = Vec::with_capacity(n);
        let mut first = vec![C64::new(0.0, 0.0); n];
        first[0] = C64::new(self.q0, 0.0);
        rows.push(first);
        for j in 0..n - 1 {
            let mut next = vec![C64::new(0.0, 0.0); n];
            next[1..].copy_from_slice(&rows[j][..n - 1]);
            for (i, h) in &self.cols[j] {
                for k in 0..n {
                    next[k] -= h * rows[*i as usize][k];
                }
            }
            for x in next.iter_mut() {
                *x /= self.sub[j];
            }
            rows.push(next);
        }
        rows
    }
}

/// Storage form of a basis.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisRepr {
    /// `S_j = σ_j z^{α_j}` (σ_j > 0).
    Scaled(Vec<f64>),
    /// `S_j = Σ_{k ≤ j} R_{jk} z^{α_k}`.
    Triangular(Matrix),
    /// Univariate Arnoldi recurrence.
    Recurrence(Recurrence),
    /// `T_k = Σ_j M_{kj} S_j` for an inner basis `S`.
    Combination { inner: Box<BasisRepr>, matrix: Matrix },
}

/// Ensemble family a basis was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Kac,
    Su,
    Onb(MeasureName),
    WeightedOnb(MeasureName, WeightId),
    Polytope(Vec<[u32; 2]>),
    /// Monomials `(j!)^{1/4} z^j` declared orthonormal: a deliberately skewed
    /// inner product.
    Skewed,
    Custom,
}

/// An orthonormal family `{S_j}`.
#[derive(Debug, Clone)]
pub struct PolynomialBasis {
    dict: MonomialDictionary,
    repr: BasisRepr,
    metric: Metric,
    degree: u32,
    family: Family,
    /// Measure defining the inner product (with its Gram normalization).
    inner: Option<(Arc<QuadratureMeasure>, f64)>,
}

impl PolynomialBasis {
    /// Basis `σ_j z^{α_j}` with flat or Fubini–Study metric.
    pub fn scaled_monomials(dict: MonomialDictionary, scales: Vec<f64>, metric: Metric, degree: u32) -> Self {
        assert_eq!(dict.len(), scales.len());
        PolynomialBasis {
            dict,
            repr: BasisRepr::Scaled(scales),
            metric,
            degree,
            family: Family::Custom,
            inner: None,
        }
    }

    pub fn dictionary(&self) -> &MonomialDictionary {
        &self.dict
    }

    pub fn repr(&self) -> &BasisRepr {
        &self.repr
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Degree `N` used to normalize currents (the dilate for polytopes).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dict.dim
    }

    /// Cardinality `n = dim S`.
    pub fn len(&self) -> usize {
        self.dict.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dict.is_empty()
    }

    /// Multiplies every basis element by `λ`.
    pub fn scaled(&self, lambda: C64) -> Self {
        let n = self.len();
        let m: Matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { lambda } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        self.transformed(m)
    }

    /// Replaces the rows by `T_k = Σ_j M_{kj} S_j`.
    pub fn transformed(&self, matrix: Matrix) -> Self {
        assert_eq!(matrix.len(), self.len());
        let mut out = self.clone();
        out.repr = BasisRepr::Combination {
            inner: Box::new(self.repr.clone()),
            matrix,
        };
        out.family = Family::Custom;
        out
    }

    /// Flat values `f_j(p)` of all basis elements.
    pub fn eval_all(&self, p: &Point, out: &mut [C64]) {
        eval_repr(&self.repr, &self.dict, p, out);
    }

    /// `log |S_j(p)|_h` for all `j` (−∞ where `S_j(p) = 0`).
    pub fn log_abs_h_all(&self, p: &Point, out: &mut [f64]) {
        let lf = self.metric.log_factor(p);
        match &self.repr {
            BasisRepr::Scaled(s) => {
                let lz = p.z.norm().ln();
                let lw = p.w.norm().ln();
                for ((o, e), sj) in out.iter_mut().zip(&self.dict.exps).zip(s) {
                    let mut v = sj.ln() + lf;
                    if e[0] > 0 {
                        v += e[0] as f64 * lz;
                    }
                    if e[1] > 0 {
                        v += e[1] as f64 * lw;
                    }
                    *o = v;
                }
            }
            _ => {
                let mut vals = vec![C64::new(0.0, 0.0); self.len()];
                self.eval_all(p, &mut vals);
                for (o, v) in out.iter_mut().zip(&vals) {
                    *o = v.norm().ln() + lf;
                }
            }
        }
    }

    /// `log Π(p, p) = log Σ_j |S_j(p)|²_h`, by log-sum-exp.
    pub fn log_kernel(&self, p: &Point) -> f64 {
        let mut buf = vec![0.0; self.len()];
        self.log_abs_h_all(p, &mut buf);
        log_sum_exp_doubled(&buf)
    }

    /// Monomial coefficient rows (`n × d`, row `j` = coefficients of `S_j`
    /// over the dictionary).
    pub fn monomial_coefficients(&self) -> Matrix {
        repr_rows(&self.repr, &self.dict)
    }

    /// Gram matrix `⟨S_i, S_j⟩ = scale · Σ_k w_k S_i(x_k) conj(S_j(x_k)) h(x_k)`.
    pub fn gram_on(&self, mu: &QuadratureMeasure, scale: f64) -> Matrix {
        let n = self.len();
        let mut g = vec![vec![C64::new(0.0, 0.0); n]; n];
        let mut vals = vec![C64::new(0.0, 0.0); n];
        for (p, w) in mu.nodes().iter().zip(mu.weights()) {
            self.eval_all(p, &mut vals);
            let f = self.metric.factor(p);
            let wk = w * f * f * scale;
            for i in 0..n {
                let a = vals[i] * wk;
                for j in 0..=i {
                    g[i][j] += a * vals[j].conj();
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                g[i][j] = g[j][i].conj();
            }
        }
        g
    }

    /// `max |G − I|` under the defining inner product, when the basis has
    /// one (declared-orthonormal families return `None`).
    pub fn gram_residual(&self) -> Option<f64> {
        let (mu, scale) = self.inner.as_ref()?;
        Some(identity_defect(&self.gram_on(mu, *scale)))
    }

    /// Measure under which the basis is orthonormal when multiplied by the
    /// returned scale.
    pub fn inner_product(&self) -> Option<(&QuadratureMeasure, f64)> {
        self.inner.as_ref().map(|(m, s)| (m.as_ref(), *s))
    }

    /// Base points inside the affine chart shared by every basis element.
    pub fn base_locus(&self) -> Vec<BaseComponent> {
        let mut out = Vec::new();
        let has_const = self.dict.exps.contains(&[0, 0]);
        if matches!(self.repr, BasisRepr::Scaled(_)) {
            if !has_const {
                out.push(BaseComponent::Origin);
            }
            if self.dim() == 2 {
                if self.dict.exps.iter().all(|e| e[0] > 0) {
                    out.push(BaseComponent::Hyperplane(0));
                }
                if self.dict.exps.iter().all(|e| e[1] > 0) {
                    out.push(BaseComponent::Hyperplane(1));
                }
            }
        }
        out
    }
}

/// Part of the base locus in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseComponent {
    Origin,
    /// `{z_i = 0}`.
    Hyperplane(usize),
}

/// Numerically stable `log Σ exp(2 a_j)`.
pub fn log_sum_exp_doubled(a: &[f64]) -> f64 {
    let m = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = a.iter().map(|x| (2.0 * (x - m)).exp()).sum();
    2.0 * m + s.ln()
}

fn identity_defect(g: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let t = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - t).norm());
        }
    }
    worst
}

fn monomial_values(dict: &MonomialDictionary, p: &Point, out: &mut [C64]) {
    let me = dict.max_exponents();
    let mut zp = Vec::with_capacity(me[0] as usize + 1);
    let mut wp = Vec::with_capacity(me[1] as usize + 1);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..=me[0] {
        zp.push(acc);
        acc *= p.z;
    }
    acc = C64::new(1.0, 0.0);
    for _ in 0..=me[1] {
        wp.push(acc);
        acc *= p.w;
    }
    for (o, e) in out.iter_mut().zip(&dict.exps) {
        *o = zp[e[0] as usize] * wp[e[1] as usize];
    }
}

fn eval_repr(repr: &BasisRepr, dict: &MonomialDictionary, p: &Point, out: &mut [C64]) {
    match repr {
        BasisRepr::Scaled(s) => {
            monomial_values(dict, p, out);
            for (o, sj) in out.iter_mut().zip(s) {
                *o *= *sj;
            }
        }
        BasisRepr::Triangular(rows) => {
            let mut mono = vec![C64::new(0.0, 0.0); dict.len()];
            monomial_values(dict, p, &mut mono);
            for (o, row) in out.iter_mut().zip(rows) {
                *o = row.iter().zip(&mono).map(|(r, m)| r * m).sum();
            }
        }
        BasisRepr::Recurrence(rec) => rec.values(p.z, out),
        BasisRepr::Combination { inner, matrix } => {
            let mut base = vec![C64::new(0.0, 0.0); out.len()];
            eval_repr(inner, dict, p, &mut base);
            for (o, row) in out.iter_mut().zip(matrix) {
                *o = row.iter().zip(&base).map(|(m, b)| m * b).sum();
            }
        }
    }
}

fn repr_rows(repr: &BasisRepr, dict: &MonomialDictionary) -> Matrix {
    let n = dict.len();
    match repr {
        BasisRepr::Scaled(s) => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            C64::new(s[i], 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect(),
        BasisRepr::Triangular(rows) => rows.clone(),
        BasisRepr::Recurrence(rec) => rec.monomial_rows(),
        BasisRepr::Combination { inner, matrix } => {
            let base = repr_rows(inner, dict);
            matrix
                .iter()
                .map(|mrow| {
                    (0..n)
                        .map(|k| mrow.iter().zip(&base).map(|(m, b)| m * b[k]).sum())
                        .collect()
                })
                .collect()
        }
    }
}

/// Orthonormalizes `dict` in `L²(w^{2·power} dμ)`.
///
/// Returns a basis whose element `j` has leading monomial `α_j` with a
/// positive coefficient (the transformation is lower triangular). The full
/// univariate dictionary `1, …, z^N` goes through Arnoldi; other
/// dictionaries through modified Gram–Schmidt on node values. Both passes
/// reorthogonalize once when the loss of orthogonality exceeds `1e-10`.
pub fn orthonormalize(
    dict: &MonomialDictionary,
    mu: &QuadratureMeasure,
    weight: Option<WeightId>,
    power: u32,
) -> Result<PolynomialBasis, EnsembleError> {
    if dict.dim() != mu.dim() {
        return Err(EnsembleError::DimensionMismatch {
            dict: dict.dim(),
            measure: mu.dim(),
        });
    }
    if dict.len() > mu.len() {
        return Err(EnsembleError::TooFewNodes {
            monomials: dict.len(),
            nodes: mu.len(),
        });
    }
    let mu = match weight {
        Some(w) if w != WeightId::Constant => mu.reweighted(|p| w.power_factor(p, power)),
        _ => mu.clone(),
    };
    let repr = if dict.is_univariate_full() {
        arnoldi(&mu, dict.len())?
    } else {
        gram_schmidt(dict, &mu)?
    };
    let basis = PolynomialBasis {
        dict: dict.clone(),
        repr,
        metric: Metric::Flat,
        degree: dict.max_degree(),
        family: Family::Custom,
        inner: Some((Arc::new(mu), 1.0)),
    };
    let residual = basis.gram_residual().unwrap_or(0.0);
    if !(residual <= GRAM_TOLERANCE) {
        return Err(EnsembleError::NotOrthonormal { residual });
    }
    Ok(basis)
}

fn inner(a: &[C64], b: &[C64], w: &[f64]) -> C64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * *w).sum()
}

fn wnorm(a: &[C64], w: &[f64]) -> f64 {
    a.iter().zip(w).map(|(x, w)| x.norm_sqr() * w).sum::<f64>().sqrt()
}

fn arnoldi(mu: &QuadratureMeasure, n: usize) -> Result<BasisRepr, EnsembleError> {
    let w = mu.weights();
    let x: Vec<C64> = mu.nodes().iter().map(|p| p.z).collect();
    let q0 = 1.0 / w.iter().sum::<f64>().sqrt();
    let mut q: Vec<Vec<C64>> = vec![vec![C64::new(q0, 0.0); x.len()]];
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    let mut cols = Vec::with_capacity(n.saturating_sub(1));
    let mut worst_ratio: f64 = 1.0;
    for j in 0..n.saturating_sub(1) {
        let mut v: Vec<C64> = x.iter().zip(&q[j]).map(|(a, b)| a * b).collect();
        let start = wnorm(&v, w);
        let mut h = vec![C64::new(0.0, 0.0); j + 1];
        for (i, qi) in q.iter().enumerate() {
            let c = inner(&v, qi, w);
            h[i] += c;
            for (a, b) in v.iter_mut().zip(qi) {
                *a -= c * b;
            }
        }
        let after = wnorm(&v, w);
        let loss = q.iter().map(|qi| inner(&v, qi, w).norm()).fold(0.0, f64::max) / after.max(f64::MIN_POSITIVE);
        if loss > REORTH_THRESHOLD {
            for (i, qi) in q.iter().enumerate() {
                let c = inner(&v, qi, w);
                h[i] += c;
                for (a, b) in v.iter_mut().zip(qi) {
                    *a -= c * b;
                }
            }
        }
        let s = wnorm(&v, w);
        worst_ratio = worst_ratio.min(s / start);
        if !(s > SINGULAR_RATIO * start) {
            return Err(EnsembleError::Singular {
                index: j + 1,
                condition: 1.0 / (worst_ratio * worst_ratio).max(f64::MIN_POSITIVE),
            });
        }
        let keep = 1e-13 * start;
        cols.push(
            h.iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > keep)
                .map(|(i, c)| (i as u32, *c))
                .collect::<Vec<_>>(),
        );
        sub.push(s);
        q.push(v.into_iter().map(|a| a / s).collect());
    }
    if cols.iter().all(|c| c.is_empty()) {
        let mut scales = Vec::with_capacity(n);
        let mut acc = q0;
        scales.push(acc);
        for s in &sub {
            acc /= s;
            scales.push(acc);
        }
        return Ok(BasisRepr::Scaled(scales));
    }
    Ok(BasisRepr::Recurrence(Recurrence { q0, sub, cols }))
}

fn gram_schmidt(dict: &MonomialDictionary, mu: &QuadratureMeasure) -> Result<BasisRepr, EnsembleError> {
    let n = dict.len();
    let w = mu.weights();
    let values: Vec<Vec<C64>> = {
        let mut cols = vec![Vec::with_capacity(mu.len()); n];
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for p in mu.nodes() {
            monomial_values(dict, p, &mut buf);
            for (c, v) in cols.iter_mut().zip(&buf) {
                c.push(*v);
            }
        }
        cols
    };
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut r: Matrix = Vec::with_capacity(n);
    let mut worst_ratio: f64 = 1.0;
    for (j, vj) in values.into_iter().enumerate() {
        let start = wnorm(&vj, w);
        let mut v = vj;
        let mut row = vec![C64::new(0.0, 0.0); n];
        row[j] = C64::new(1.0, 0.0);
        let project = |v: &mut Vec<C64>, row: &mut Vec<C64>, q: &[Vec<C64>], r: &Matrix| {
            for (qi, ri) in q.iter().zip(r) {
                let c = inner(v, qi, w);
                for (a, b) in v.iter_mut().zip(qi) {
                    *a -= c * b;
                }
                for (a, b) in row.iter_mut().zip(ri) {
                    *a -= c * b;
                }
            }
        };
        project(&mut v, &mut row, &q, &r);
        let after = wnorm(&v, w);
        let loss = q.iter().map(|qi| inner(&v, qi, w).norm()).fold(0.0, f64::max) / after.max(f64::MIN_POSITIVE);
        if loss > REORTH_THRESHOLD {
            project(&mut v, &mut row, &q, &r);
        }
        let s = wnorm(&v, w);
        worst_ratio = worst_ratio.min(s / start);
        if !(s > SINGULAR_RATIO * start) {
            return Err(EnsembleError::Singular {
                index: j,
                condition: 1.0 / (worst_ratio * worst_ratio).max(f64::MIN_POSITIVE),
            });
        }
        q.push(v.into_iter().map(|a| a / s).collect());
        r.push(row.into_iter().map(|a| a / s).collect());
    }
    let diagonal = r.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(k, x)| k == i || x.norm() <= 1e-13 * row[i].norm())
    });
    if diagonal {
        return Ok(BasisRepr::Scaled(
            r.iter().enumerate().map(|(i, row)| row[i].re).collect(),
        ));
    }
    Ok(BasisRepr::Triangular(r))
}

/// Declarative description of an ensemble, with a canonical text form such
/// as `family=onb measure=interval-arcsine N=100`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub family: Family,
    pub degree: u32,
    pub dim: usize,
}

impl EnsembleSpec {
    pub fn new(family: Family, degree: u32, dim: usize) -> Self {
        EnsembleSpec { family, degree, dim }
    }

    pub fn with_degree(&self, degree: u32) -> Self {
        EnsembleSpec { degree, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.degree < 1 {
            return Err(EnsembleError::InvalidSpec("N must be at least 1".to_string()));
        }
        if self.dim != 1 && self.dim != 2 {
            return Err(EnsembleError::InvalidSpec(format!(
                "dimension {} not in {{1, 2}}",
                self.dim
            )));
        }
        match &self.family {
            Family::Onb(m) | Family::WeightedOnb(m, _) if m.dim() != self.dim => Err(EnsembleError::InvalidSpec(
                format!("measure {m} lives in dimension {}", m.dim()),
            )),
            Family::Polytope(v) if v.is_empty() => Err(EnsembleError::EmptyPolytope),
            Family::Skewed if self.dim != 1 => Err(EnsembleError::InvalidSpec("skewed is univariate".to_string())),
            Family::Custom => Err(EnsembleError::InvalidSpec("custom bases have no spec".to_string())),
            _ => Ok(()),
        }
    }

    /// Number of equations `k = m` solved for point zero sets.
    pub fn codim(&self) -> usize {
        self.dim
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Kac if self.dim == 1 => write!(f, "family=kac")?,
            Family::Kac => write!(f, "family=kac m={}", self.dim)?,
            Family::Su => write!(f, "family=su{}", self.dim + 1)?,
            Family::Onb(m) => write!(f, "family=onb measure={m}")?,
            Family::WeightedOnb(m, w) => write!(f, "family=weighted-onb measure={m} weight={}", w.as_str())?,
            Family::Polytope(v) => {
                write!(f, "family=polytope vertices=")?;
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    if self.dim == 1 {
                        write!(f, "({})", e[0])?;
                    } else {
                        write!(f, "({},{})", e[0], e[1])?;
                    }
                }
            }
            Family::Skewed => write!(f, "family=skewed")?,
            Family::Custom => write!(f, "family=custom")?,
        }
        write!(f, " N={}", self.degree)
    }
}

fn parse_vertices(s: &str) -> Result<(Vec<[u32; 2]>, usize), EnsembleError> {
    let bad = || EnsembleError::InvalidSpec(format!("malformed vertices `{s}`"));
    let mut out = Vec::new();
    let mut dim = 0;
    for part in s.split(';') {
        let inner = part
            .trim()
            .strip_prefix('(')
            .and_then(|p| p.strip_suffix(')'))
            .ok_or_else(bad)?;
        let nums: Result<Vec<u32>, _> = inner.split(',').map(|x| x.trim().parse::<u32>()).collect();
        let nums = nums.map_err(|_| bad())?;
        if nums.is_empty() || nums.len() > 2 || (dim != 0 && nums.len() != dim) {
            return Err(bad());
        }
        dim = nums.len();
        out.push([nums[0], nums.get(1).copied().unwrap_or(0)]);
    }
    Ok((out, dim))
}

impl FromStr for EnsembleSpec {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut family = None;
        let mut degree = None;
        let mut dim = None;
        let mut measure = None;
        let mut weight = None;
        let mut vertices = None;
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| EnsembleError::InvalidSpec(format!("token `{tok}` is not key=value")))?;
            match k {
                "family" => family = Some(v.to_string()),
                "N" => {
                    degree = Some(
                        v.parse::<u32>()
                            .map_err(|_| EnsembleError::InvalidSpec(format!("bad degree `{v}`")))?,
                    )
                }
                "m" => {
                    dim = Some(
                        v.parse::<usize>()
                            .map_err(|_| EnsembleError::InvalidSpec(format!("bad dimension `{v}`")))?,
                    )
                }
                "measure" => measure = Some(v.parse::<MeasureName>()?),
                "weight" => weight = Some(v.parse::<WeightId>()?),
                "vertices" => vertices = Some(parse_vertices(v)?),
                _ => return Err(EnsembleError::InvalidSpec(format!("unknown key `{k}`"))),
            }
        }
        let family_name = family.ok_or_else(|| EnsembleError::InvalidSpec("missing family".to_string()))?;
        let degree = degree.ok_or_else(|| EnsembleError::InvalidSpec("missing N".to_string()))?;
        let need_measure =
            || measure.ok_or_else(|| EnsembleError::InvalidSpec(format!("family {family_name} needs measure=")));
        let (fam, d) = match family_name.as_str() {
            "kac" => (Family::Kac, dim.unwrap_or(1)),
            "su2" => (Family::Su, 1),
            "su3" => (Family::Su, 2),
            "su" => (Family::Su, dim.unwrap_or(1)),
            "onb" => {
                let m = need_measure()?;
                (Family::Onb(m), m.dim())
            }
            "weighted-onb" => {
                let m = need_measure()?;
                (Family::WeightedOnb(m, weight.unwrap_or(WeightId::Constant)), m.dim())
            }
            "polytope" => {
                let (v, d) = vertices
                    .clone()
                    .ok_or_else(|| EnsembleError::InvalidSpec("polytope needs vertices=".to_string()))?;
                (Family::Polytope(v), d)
            }
            "skewed" => (Family::Skewed, 1),
            other => return Err(EnsembleError::InvalidSpec(format!("unknown family `{other}`"))),
        };
        if let Some(m) = dim {
            if m != d {
                return Err(EnsembleError::InvalidSpec(format!(
                    "m={m} conflicts with family dimension {d}"
                )));
            }
        }
        let spec = EnsembleSpec::new(fam, degree, d);
        spec.validate()?;
        Ok(spec)
    }
}

/// Lattice points of the dilate `N·P` of the convex hull of `vertices`.
pub fn polytope_lattice_points(vertices: &[[u32; 2]], dim: usize, n: u32) -> Vec<[u32; 2]> {
    let pts: Vec<[i64; 2]> = vertices
        .iter()
        .map(|v| {
            [
                v[0] as i64 * n as i64,
                if dim == 2 { v[1] as i64 * n as i64 } else { 0 },
            ]
        })
        .collect();
    let hull = convex_hull(&pts);
    let max = [
        pts.iter().map(|p| p[0]).max().unwrap_or(0),
        pts.iter().map(|p| p[1]).max().unwrap_or(0),
    ];
    let min = [
        pts.iter().map(|p| p[0]).min().unwrap_or(0),
        pts.iter().map(|p| p[1]).min().unwrap_or(0),
    ];
    let mut out = Vec::new();
    for a in min[0]..=max[0] {
        for b in min[1]..=max[1] {
            if in_hull(&hull, [a, b]) {
                out.push([a as u32, b as u32]);
            }
        }
    }
    out.sort_by(graded_lex);
    out
}

fn cross(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone chain; returns counter-clockwise vertices without collinear
/// points.
fn convex_hull(pts: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut p: Vec<[i64; 2]> = pts.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], *q) <= 0 {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], *q) <= 0 {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn in_hull(hull: &[[i64; 2]], q: [i64; 2]) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == q,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(a, b, q) == 0
                && q[0] >= a[0].min(b[0])
                && q[0] <= a[0].max(b[0])
                && q[1] >= a[1].min(b[1])
                && q[1] <= a[1].max(b[1])
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], q) >= 0),
    }
}

fn su_scales(dict: &MonomialDictionary, homogeneous: u32) -> Vec<f64> {
    dict.exps
        .iter()
        .map(|e| (0.5 * ln_multinomial(homogeneous, *e)).exp())
        .collect()
}

/// Number of monomials of degree ≤ d in m variables.
fn full_dimension(dim: usize, d: u32) -> f64 {
    let d = d as f64;
    if dim == 1 {
        d + 1.0
    } else {
        (d + 1.0) * (d + 2.0) / 2.0
    }
}

/// Builds the orthonormal basis of an ensemble.
pub fn build_ensemble(spec: &EnsembleSpec) -> Result<PolynomialBasis, EnsembleError> {
    spec.validate()?;
    let n = spec.degree;
    let dim = spec.dim;
    let fs_inner = |d: u32, homogeneous: u32| -> Result<(Arc<QuadratureMeasure>, f64), EnsembleError> {
        let mu = QuadratureMeasure::fubini_study(dim, (homogeneous as usize / 2 + 2).max(4))?;
        Ok((Arc::new(mu), full_dimension(dim, d)))
    };
    let mut basis = match &spec.family {
        Family::Kac => {
            let dict = MonomialDictionary::total_degree(dim, n);
            let len = dict.len();
            let mut b = PolynomialBasis::scaled_monomials(dict, vec![1.0; len], Metric::Flat, n);
            let name = if dim == 1 {
                MeasureName::UnitCircleArc
            } else {
                MeasureName::Torus2d
            };
            b.inner = Some((Arc::new(QuadratureMeasure::for_degree(name, n)?), 1.0));
            b
        }
        Family::Su => {
            let dict = MonomialDictionary::total_degree(dim, n);
            let scales = su_scales(&dict, n);
            let mut b = PolynomialBasis::scaled_monomials(dict, scales, Metric::FubiniStudy(n), n);
            b.inner = Some(fs_inner(n, n)?);
            b
        }
        Family::Onb(m) => {
            let dict = MonomialDictionary::total_degree(dim, n);
            let mu = QuadratureMeasure::for_degree(*m, n)?;
            orthonormalize(&dict, &mu, None, n)?
        }
        Family::WeightedOnb(m, w) => {
            let dict = MonomialDictionary::total_degree(dim, n);
            let mu = QuadratureMeasure::for_degree(*m, n)?;
            orthonormalize(&dict, &mu, Some(*w), n)?
        }
        Family::Polytope(vertices) => {
            let exps = polytope_lattice_points(vertices, dim, n);
            if exps.is_empty() {
                return Err(EnsembleError::EmptyPolytope);
            }
            let p = vertices.iter().map(|v| v[0] + v[1]).max().unwrap_or(0).max(1);
            let d = p * n;
            let dict = MonomialDictionary::from_exponents(dim, exps)?;
            let scales = su_scales(&dict, d);
            let mut b = PolynomialBasis::scaled_monomials(dict, scales, Metric::FubiniStudy(d), n);
            b.inner = Some(fs_inner(d, d)?);
            b
        }
        Family::Skewed => {
            let dict = MonomialDictionary::total_degree(1, n);
            let scales = (0..=n).map(|j| (0.25 * ln_factorial(j)).exp()).collect();
            PolynomialBasis::scaled_monomials(dict, scales, Metric::Flat, n)
        }
        Family::Custom => unreachable!("rejected by validate"),
    };
    basis.family = spec.family.clone();
    basis.degree = n;
    Ok(basis)
}

/// Evaluation form of a sampled section, prepared once per sample.
#[derive(Debug, Clone, PartialEq)]
enum SampleForm {
    /// Monomial coefficients `a_0 … a_D` of a univariate polynomial.
    Monomial(Vec<C64>),
    /// Coefficients in the recurrence basis.
    Series,
    /// `table[a][b]` = coefficient of `z^a w^b`.
    Table(Vec<Vec<C64>>),
}

/// One random section `s = Σ c_j S_j`.
#[derive(Debug, Clone)]
pub struct GaussianSample<'a> {
    basis: &'a PolynomialBasis,
    coeffs: Vec<C64>,
    key: StreamKey,
    form: SampleForm,
}

/// Draws `c_j` i.i.d. standard complex Gaussian from the stream
/// `(seed, trial, lane 0)`.
pub fn sample(basis: &PolynomialBasis, seed: u64, trial: u64) -> GaussianSample<'_> {
    sample_keyed(basis, StreamKey::new(seed, trial, 0))
}

/// Like [`sample`] with an explicit stream key (lanes distinguish the
/// equations of a system).
pub fn sample_keyed(basis: &PolynomialBasis, key: StreamKey) -> GaussianSample<'_> {
    let mut rng = key.rng();
    let coeffs: Vec<C64> = (0..basis.len()).map(|_| complex_gaussian(&mut rng)).collect();
    GaussianSample::with_coefficients(basis, coeffs, key)
}

impl<'a> GaussianSample<'a> {
    pub fn with_coefficients(basis: &'a PolynomialBasis, coeffs: Vec<C64>, key: StreamKey) -> Self {
        assert_eq!(
            coeffs.len(),
            basis.len(),
            "coefficient count must equal basis cardinality"
        );
        let form = sample_form(basis, &coeffs);
        GaussianSample {
            basis,
            coeffs,
            key,
            form,
        }
    }

    pub fn basis(&self) -> &'a PolynomialBasis {
        self.basis
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn key(&self) -> StreamKey {
        self.key
    }

    /// `Σ c_j f_j(p)` in the affine chart.
    pub fn evaluate(&self, p: &Point) -> C64 {
        match &self.form {
            SampleForm::Monomial(a) => horner(a, p.z),
            SampleForm::Series => match &self.basis.repr {
                BasisRepr::Recurrence(rec) => {
                    let (e, k) = rec.series(&self.coeffs, p.z);
                    e.value * 2f64.powi(499 * k)
                }
                _ => unreachable!(),
            },
            SampleForm::Table(t) => table_eval(t, p),
        }
    }

    /// `|s(p)|_h`.
    pub fn evaluate_h(&self, p: &Point) -> f64 {
        self.evaluate(p).norm() * self.basis.metric.factor(p)
    }

    /// Univariate view for root finding (`m = 1`).
    pub fn univariate(&self) -> Option<SectionPoly<'_>> {
        match &self.form {
            SampleForm::Monomial(a) => Some(SectionPoly::Monomial(MonomialPoly::new(a.clone()))),
            SampleForm::Series => match &self.basis.repr {
                BasisRepr::Recurrence(rec) => Some(SectionPoly::Series(OrthogonalSeries {
                    coeffs: &self.coeffs,
                    rec,
                    radius: self
                        .basis
                        .inner
                        .as_ref()
                        .map(|(m, _)| m.support_radius())
                        .unwrap_or(1.0),
                })),
                _ => None,
            },
            SampleForm::Table(_) => None,
        }
    }

    /// Coefficient table `t[a][b]` of `z^a w^b` (`m = 2`).
    pub fn table(&self) -> Option<&[Vec<C64>]> {
        match &self.form {
            SampleForm::Table(t) => Some(t),
            _ => None,
        }
    }
}

fn sample_form(basis: &PolynomialBasis, c: &[C64]) -> SampleForm {
    let dict = &basis.dict;
    if let (1, BasisRepr::Recurrence(_)) = (dict.dim, &basis.repr) {
        return SampleForm::Series;
    }
    // monomial expansion: Σ_j c_j R_{jk}
    let coeff_of_monomial: Vec<C64> = match &basis.repr {
        BasisRepr::Scaled(s) => c.iter().zip(s).map(|(c, s)| c * *s).collect(),
        _ => {
            let rows = basis.monomial_coefficients();
            (0..dict.len())
                .map(|k| c.iter().zip(&rows).map(|(c, r)| c * r[k]).sum())
                .collect()
        }
    };
    let me = dict.max_exponents();
    if dict.dim == 1 {
        let mut a = vec![C64::new(0.0, 0.0); me[0] as usize + 1];
        for (e, v) in dict.exps.iter().zip(&coeff_of_monomial) {
            a[e[0] as usize] += *v;
        }
        SampleForm::Monomial(a)
    } else {
        let mut t = vec![vec![C64::new(0.0, 0.0); me[1] as usize + 1]; me[0] as usize + 1];
        for (e, v) in dict.exps.iter().zip(&coeff_of_monomial) {
            t[e[0] as usize][e[1] as usize] += *v;
        }
        SampleForm::Table(t)
    }
}

fn horner(a: &[C64], z: C64) -> C64 {
    a.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn table_eval(t: &[Vec<C64>], p: &Point) -> C64 {
    t.iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, row| acc * p.z + horner(row, p.w))
}

/// A univariate section ready for root finding.
#[derive(Debug, Clone)]
pub enum SectionPoly<'a> {
    Monomial(MonomialPoly),
    Series(OrthogonalSeries<'a>),
}

impl Univariate for SectionPoly<'_> {
    fn degree(&self) -> usize {
        match self {
            SectionPoly::Monomial(p) => p.degree(),
            SectionPoly::Series(p) => p.degree(),
        }
    }

    fn eval(&self, z: C64) -> UnivariateEval {
        match self {
            SectionPoly::Monomial(p) => p.eval(z),
            SectionPoly::Series(p) => p.eval(z),
        }
    }

    fn newton(&self, z: C64) -> (Option<C64>, f64) {
        match self {
            SectionPoly::Monomial(p) => p.newton(z),
            SectionPoly::Series(p) => p.newton(z),
        }
    }

    fn initial_guesses(&self) -> Vec<C64> {
        match self {
            SectionPoly::Monomial(p) => p.initial_guesses(),
            SectionPoly::Series(p) => p.initial_guesses(),
        }
    }

    fn zero_roots(&self) -> usize {
        match self {
            SectionPoly::Monomial(p) => p.zero_roots(),
            SectionPoly::Series(_) => 0,
        }
    }
}

/// `Σ c_j q_j` for a recurrence basis.
#[derive(Debug, Clone)]
pub struct OrthogonalSeries<'a> {
    coeffs: &'a [C64],
    rec: &'a Recurrence,
    radius: f64,
}

impl Univariate for OrthogonalSeries<'_> {
    fn degree(&self) -> usize {
        let last = self.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0)).unwrap_or(0);
        last
    }

    fn eval(&self, z: C64) -> UnivariateEval {
        self.rec.series(&self.coeffs[..=self.degree()], z).0
    }

    fn initial_guesses(&self) -> Vec<C64> {
        crate::rootfind::circle_guesses(self.degree(), 1.1 * self.radius.max(f64::MIN_POSITIVE))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::powi;

    fn chebyshev_rows(n: usize) -> Matrix {
        // T_0 = 1, T_1 = x, T_{k+1} = 2x T_k - T_{k-1}
        let mut t: Vec<Vec<f64>> = vec![vec![0.0; n + 1]; n + 1];
        t[0][0] = 1.0;
        if n >= 1 {
            t[1][1] = 1.0;
        }
        for k in 1..n {
            for i in 0..=n {
                let shifted = if i > 0 { 2.0 * t[k][i - 1] } else { 0.0 };
                t[k + 1][i] = shifted - t[k - 1][i];
            }
        }
        t.iter()
            .enumerate()
            .map(|(k, row)| {
                let s = if k == 0 { 1.0 } else { core::f64::consts::SQRT_2 };
                row.iter().map(|x| C64::new(x * s, 0.0)).collect()
            })
            .collect()
    }

    #[test]
    fn circle_orthonormalization_is_identity() {
        let dict = MonomialDictionary::total_degree(1, 8);
        let mu = QuadratureMeasure::build(MeasureName::UnitCircleArc, 32).unwrap();
        let b = orthonormalize(&dict, &mu, None, 8).unwrap();
        let rows = b.monomial_coefficients();
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((x - t).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn arcsine_orthonormalization_is_chebyshev() {
        let dict = MonomialDictionary::total_degree(1, 4);
        let mu = QuadratureMeasure::build(MeasureName::IntervalArcsine, 16).unwrap();
        let b = orthonormalize(&dict, &mu, None, 4).unwrap();
        let rows = b.monomial_coefficients();
        let expect = chebyshev_rows(4);
        for (r, e) in rows.iter().zip(&expect) {
            for (x, y) in r.iter().zip(e) {
                assert!((x - y).norm() < 1e-10, "{x} vs {y}");
            }
        }
        assert!(b.gram_residual().unwrap() < 1e-12);
    }

    #[test]
    fn arcsine_high_degree_stays_orthonormal() {
        let spec: EnsembleSpec = "family=onb measure=interval-arcsine N=300".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert_eq!(b.len(), 301);
        assert!(b.gram_residual().unwrap() < GRAM_TOLERANCE);
        match b.repr() {
            BasisRepr::Recurrence(r) => assert!(r.bandwidth() <= 2),
            other => panic!("expected recurrence, got {other:?}"),
        }
    }

    #[test]
    fn su2_coefficients() {
        let spec: EnsembleSpec = "family=su2 N=3".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        let rows = b.monomial_coefficients();
        let s3 = 3f64.sqrt();
        let expect = [1.0, s3, s3, 1.0];
        for (j, e) in expect.iter().enumerate() {
            assert!((rows[j][j].re - e).abs() < 1e-12);
        }
        assert_eq!(b.metric(), Metric::FubiniStudy(3));
        assert!(b.gram_residual().unwrap() < 1e-10);
    }

    #[test]
    fn su3_gram() {
        let spec: EnsembleSpec = "family=su3 N=4".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert_eq!(b.len(), 15);
        assert!(b.gram_residual().unwrap() < 1e-10);
    }

    #[test]
    fn polytope_simplex_lattice() {
        let spec: EnsembleSpec = "family=polytope vertices=(0,0);(1,0);(0,1) N=2".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert_eq!(
            b.dictionary().exponents(),
            &[[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
        );
        assert!(b.gram_residual().unwrap() < 1e-10);
        assert!(b.base_locus().is_empty());
    }

    #[test]
    fn polytope_square_and_base_locus() {
        let pts = polytope_lattice_points(&[[0, 0], [1, 0], [0, 1], [1, 1]], 2, 3);
        assert_eq!(pts.len(), 16);
        let spec: EnsembleSpec = "family=polytope vertices=(1,0);(0,1);(1,1) N=1".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert_eq!(b.base_locus(), vec![BaseComponent::Origin]);
        let spec: EnsembleSpec = "family=polytope vertices=(1,0);(1,1) N=2".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert!(b.base_locus().contains(&BaseComponent::Hyperplane(0)));
    }

    #[test]
    fn weighted_disk_is_diagonal() {
        let spec: EnsembleSpec = "family=weighted-onb measure=unit-disk-area weight=gaussian-radial N=6"
            .parse()
            .unwrap();
        let b = build_ensemble(&spec).unwrap();
        assert!(matches!(b.repr(), BasisRepr::Scaled(_)));
        assert!(b.gram_residual().unwrap() < 1e-10);
    }

    #[test]
    fn bidisk_and_torus_orthonormalize() {
        for name in ["torus-2d", "bidisk-area"] {
            let spec: EnsembleSpec = format!("family=onb measure={name} N=4").parse().unwrap();
            let b = build_ensemble(&spec).unwrap();
            assert_eq!(b.len(), 15);
            assert!(b.gram_residual().unwrap() < 1e-10);
        }
    }

    #[test]
    fn singular_gram_is_reported() {
        let dict = MonomialDictionary::total_degree(1, 10);
        let mu = QuadratureMeasure::build(MeasureName::UnitCircleArc, 6).unwrap();
        assert!(matches!(
            orthonormalize(&dict, &mu, None, 10),
            Err(EnsembleError::TooFewNodes { .. })
        ));
        let mu = QuadratureMeasure::build(MeasureName::UnitCircleArc, 11).unwrap();
        let dict = MonomialDictionary::from_exponents(1, vec![[0, 0], [11, 0]]).unwrap();
        assert!(matches!(
            orthonormalize(&dict, &mu, None, 11),
            Err(EnsembleError::Singular { index: 1, .. })
        ));
    }

    #[test]
    fn spec_text_round_trip() {
        for s in [
            "family=su2 N=50",
            "family=su3 N=6",
            "family=kac N=20",
            "family=kac m=2 N=6",
            "family=onb measure=interval-arcsine N=100",
            "family=weighted-onb measure=unit-disk-area weight=gaussian-radial N=10",
            "family=polytope vertices=(0,0);(2,0);(0,2) N=5",
            "family=skewed N=20",
        ] {
            let spec: EnsembleSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("family=onb N=3".parse::<EnsembleSpec>().is_err());
        assert!("family=kac N=0".parse::<EnsembleSpec>().is_err());
        assert!("family=kac".parse::<EnsembleSpec>().is_err());
        assert!("family=kac N=3 q=1".parse::<EnsembleSpec>().is_err());
    }

    #[test]
    fn evaluate_examples() {
        let spec: EnsembleSpec = "family=kac N=4".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        let mut c = vec![C64::new(0.0, 0.0); 5];
        c[0] = C64::new(1.0, 0.0);
        let s = GaussianSample::with_coefficients(&b, c.clone(), StreamKey::default());
        assert_eq!(s.evaluate(&Point::one(C64::new(0.3, -2.0))), C64::new(1.0, 0.0));
        c[0] = C64::new(0.0, 0.0);
        c[1] = C64::new(1.0, 0.0);
        let s = GaussianSample::with_coefficients(&b, c, StreamKey::default());
        assert_eq!(s.evaluate(&Point::one(C64::new(2.0, 0.0))), C64::new(2.0, 0.0));
    }

    #[test]
    fn evaluate_h_matches_direct_formula() {
        let spec: EnsembleSpec = "family=su2 N=7".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        let s = sample(&b, 11, 2);
        for z in [C64::new(0.1, 0.2), C64::new(-3.0, 1.5), C64::new(0.0, 0.0)] {
            let direct: C64 = (0..=7u32)
                .map(|j| s.coefficients()[j as usize] * (0.5 * ln_multinomial(7, [j, 0])).exp() * powi(z, j))
                .sum();
            let expect = direct.norm() / (1.0 + z.norm_sqr()).powf(3.5);
            let got = s.evaluate_h(&Point::one(z));
            assert!((got - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec: EnsembleSpec = "family=kac N=10".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        let a = sample(&b, 5, 9);
        let c = sample(&b, 5, 9);
        assert_eq!(a.coefficients(), c.coefficients());
        let d = sample(&b, 5, 10);
        assert_ne!(a.coefficients(), d.coefficients());
    }

    #[test]
    fn series_evaluation_matches_monomial_expansion() {
        let spec: EnsembleSpec = "family=onb measure=interval-arcsine N=12".parse().unwrap();
        let b = build_ensemble(&spec).unwrap();
        let s = sample(&b, 3, 1);
        let rows = b.monomial_coefficients();
        let z = C64::new(0.3, 0.4);
        let direct: C64 = s.coefficients().iter().zip(&rows).map(|(c, r)| c * horner(r, z)).sum();
        assert!((s.evaluate(&Point::one(z)) - direct).norm() < 1e-10);
    }
}
