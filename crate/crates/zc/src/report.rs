//! Experiment reports and their JSON/CSV serializations.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind};

/// Statistics of `(Ṽ Z, φ)` over the trials of one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingStats {
    /// Index into the standard dictionary.
    pub phi: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    /// `∫ φ dμ_ref`.
    pub reference: Option<f64>,
    /// `N^{−k} ∫ φ E(Z)` from the Szegő kernel.
    pub kernel: Option<f64>,
    /// Stencil error of `kernel`.
    pub kernel_error: Option<f64>,
    /// `|mean − reference| ≤ 3 SE`.
    pub reference_ok: Option<bool>,
    /// `|mean − kernel| ≤ 3 SE + stencil bound`.
    pub kernel_ok: Option<bool>,
}

/// Trial bookkeeping for one degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialCounts {
    /// Accepted trials.
    pub trials: usize,
    /// Trial indices consumed.
    pub attempts: usize,
    /// Solver errors.
    pub failures: usize,
    /// Clustered (non-simple) zero sets.
    pub non_simple: usize,
    /// Bivariate solves that missed zeros.
    pub incomplete: usize,
}

impl TrialCounts {
    /// Fraction of attempts whose zero set was complete and simple.
    pub fn accepted_fraction(&self) -> f64 {
        self.trials as f64 / self.attempts as f64
    }
}

/// Monte-Carlo zero count against kernel mass on one coarse cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    /// Lower-left corner.
    pub x: f64,
    pub y: f64,
    pub mc: f64,
    pub se: f64,
    pub kernel: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub half: f64,
    pub cells: usize,
    pub interior: usize,
    pub passing: usize,
    pub fraction: f64,
    /// Kernel mass of the interior cells.
    pub kernel_mass: f64,
    /// Mean zero count in the interior cells.
    pub mc_mass: f64,
    pub rows: Vec<CellRow>,
}

/// Results for one degree of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBlock {
    pub degree: u32,
    pub counts: TrialCounts,
    pub pairings: Vec<PairingStats>,
    pub cells: Option<CellComparison>,
    /// Polytope concentration: mean fraction of zeros inside the window.
    pub window_mass: Option<f64>,
    pub window_mass_se: Option<f64>,
}

/// Weighted least-squares fit of `log Var` against `log N` for one φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub phi: usize,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// 95% band on the slope.
    pub band: [f64; 2],
    /// `Var·N³ / (π⁻¹ζ(3)/4 · ‖∂∂̄φ‖²)` per degree (SU(2) only).
    pub constant_ratio: Option<Vec<f64>>,
    /// Whether the last ratio lies within ±50% of 1 (informational).
    pub constant_within_band: Option<bool>,
}

/// Single-sequence deviations from the limit measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub degrees: Vec<u32>,
    pub deviations: Vec<f64>,
    /// `sup_{M ≥ N} d_M`.
    pub tail_sup: Vec<f64>,
    pub tail_from: u32,
    pub sup_after: f64,
    pub epsilon: f64,
    pub exceed_count: usize,
    pub spearman: f64,
}

/// Side-by-side pairing means of two ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub against: String,
    pub degree: u32,
    pub phi: usize,
    pub mean: f64,
    pub other: f64,
    pub combined_se: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeSummary {
    pub window: [f64; 2],
    pub window_mass: Vec<f64>,
    pub non_decreasing: bool,
    pub comparisons: Vec<Comparison>,
}

/// Full report of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub degrees: Vec<DegreeBlock>,
    pub fits: Vec<SlopeFit>,
    pub trajectory: Option<Trajectory>,
    pub polytope: Option<PolytopeSummary>,
    /// Human-readable gate violations.
    pub flags: Vec<String>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per `(N, φ)`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,phi,trials,mean,mean_se,variance,variance_se,reference,kernel,kernel_error\n");
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for b in &self.degrees {
            for p in &b.pairings {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    b.degree,
                    p.phi,
                    b.counts.trials,
                    p.mean,
                    p.mean_se,
                    p.variance,
                    p.variance_se,
                    opt(p.reference),
                    opt(p.kernel),
                    opt(p.kernel_error)
                );
            }
        }
        s
    }
}
