//! Experiment engine, file formats and command line for the `zc-core`
//! random-polynomial library.
//!
//! * [`mc`]: expectation, variance, trajectory and polytope-concentration
//!   experiments, run data-parallel with order-independent reduction;
//! * [`config`]: the JSON experiment document and its canonical hash;
//! * [`report`]: experiment reports with JSON and CSV serializations;
//! * [`svg`]: deterministic vector figures;
//! * [`cli`]: the `zc` command.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod mc;
pub mod report;
pub mod svg;

pub use config::{ExperimentConfig, ExperimentKind};
pub use report::ExperimentReport;
