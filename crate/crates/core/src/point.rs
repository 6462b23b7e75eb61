use crate::C64;
#[allow(unused_imports)]
use num_traits::Float as _;

/// A point of `C^m` for `m ∈ {1, 2}`. One-variable points keep `w = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub z: C64,
    pub w: C64,
}

impl Point {
    pub const ORIGIN: Point = Point {
        z: C64::new(0.0, 0.0),
        w: C64::new(0.0, 0.0),
    };

    pub fn one(z: C64) -> Self {
        Point {
            z,
            w: C64::new(0.0, 0.0),
        }
    }

    pub fn two(z: C64, w: C64) -> Self {
        Point { z, w }
    }

    /// Squared Hermitian norm `|z|² + |w|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn coord(&self, i: usize) -> C64 {
        match i {
            0 => self.z,
            _ => self.w,
        }
    }

    pub fn conj(&self) -> Self {
        Point {
            z: self.z.conj(),
            w: self.w.conj(),
        }
    }

    /// Distance in the max-norm over coordinates.
    pub fn dist_max(&self, other: &Point) -> f64 {
        (self.z - other.z).norm().max((self.w - other.w).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.z.re.is_finite() && self.z.im.is_finite() && self.w.re.is_finite() && self.w.im.is_finite()
    }

    /// Evaluates the monomial `z^a w^b`.
    pub fn monomial(&self, exp: [u32; 2]) -> C64 {
        powi(self.z, exp[0]) * powi(self.w, exp[1])
    }
}

/// Integer power by repeated squaring (bitwise deterministic, no `ln`).
pub fn powi(z: C64, mut e: u32) -> C64 {
    let mut base = z;
    let mut acc = C64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
