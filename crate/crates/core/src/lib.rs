//! Gaussian random polynomial ensembles and the statistics of their zeros.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * [`measures`]: discrete quadrature stand-ins for measures on compact sets
//!   in `C` and `C^2`;
//! * [`ensemble`]: orthonormal polynomial bases (Kac, SU(m+1), orthonormalized
//!   on a measure, Newton polytope) and seeded Gaussian sampling;
//! * [`szego`]: the diagonal Szegő kernel and the expected zero density
//!   `(i/2π)∂∂̄ log Π + c₁` on grids;
//! * [`rootfind`]: Aberth–Ehrlich for one variable and resultant elimination
//!   for square systems in two variables;
//! * [`currents`]: pairings of zero sets with smooth bump test functions, by
//!   summing over zeros and by the Poincaré–Lelong quadrature;
//! * [`reference`]: equilibrium measures, Green functions and discrepancies;
//! * [`stats`]: the small amount of descriptive statistics the experiments need.
//!
//! Parallel experiment orchestration, file formats and the command line live
//! in the companion `zc` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod currents;
pub mod ensemble;
pub mod grid;
pub mod linalg;
pub mod measures;
pub mod point;
pub mod quadrature;
pub mod reference;
pub mod rng;
pub mod rootfind;
pub mod stats;
pub mod szego;

pub use num_complex::Complex64;
pub use point::Point;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

/// Crate-level error aggregating the per-module failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Measure(#[from] measures::MeasureError),
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
    #[error(transparent)]
    Szego(#[from] szego::SzegoError),
    #[error(transparent)]
    Root(#[from] rootfind::RootError),
    #[error(transparent)]
    Currents(#[from] currents::CurrentsError),
    #[error(transparent)]
    Reference(#[from] reference::ReferenceError),
}
