//! The experiment engine.
//!
//! Trials run data-parallel on a rayon pool. Every trial draws from its own
//! keyed stream and results are reduced in trial-index order, so reports do
//! not depend on the schedule or on the number of workers.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use zc_core::currents::{fs_hessian_norms, pair_points, Dictionary, TestFunction};
use zc_core::ensemble::{build_ensemble, sample, sample_keyed, EnsembleError, EnsembleSpec, Family, PolynomialBasis};
use zc_core::grid::{Axis, ComplexGrid};
use zc_core::quadrature::ZETA_3;
use zc_core::reference::discrepancy;
use zc_core::rng::{derive_seed, StreamKey};
use zc_core::rootfind::{roots_bivariate, roots_of, BivariatePoly, RootError, ZeroSet};
use zc_core::stats::{spearman, weighted_least_squares, Summary};
use zc_core::szego::{expected_density, kernel_on_grid, ExpectedZeroDensity};

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind, GridConfig};
use crate::report::{
    CellComparison, CellRow, Comparison, DegreeBlock, ExperimentReport, PairingStats, PolytopeSummary, SlopeFit,
    Trajectory, TrialCounts,
};

/// Largest tolerated fraction of solver errors among trial attempts.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, thiserror::Error)]
pub enum McError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("ensemble: {0}")]
    Ensemble(#[from] EnsembleError),
    #[error("solver failed on {failures} of {attempts} attempts at N = {degree}")]
    SolverFailures {
        degree: u32,
        failures: usize,
        attempts: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Worker pool honoring `ZC_THREADS`.
pub fn global_pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("ZC_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
        pool_with(threads.unwrap_or(0))
    })
}

/// Pool with `threads` workers (`0`: hardware parallelism).
pub fn pool_with(threads: usize) -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Why a trial was not accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    Failure,
    NonSimple,
    Incomplete,
}

/// Zero set of the system drawn for `trial`: one section for `m = 1`, two
/// independent sections (lanes 0 and 1) for `m = 2`.
pub fn solve_trial(basis: &PolynomialBasis, seed: u64, trial: u64) -> Result<ZeroSet, Rejection> {
    let zs = if basis.dim() == 1 {
        let s = sample(basis, seed, trial);
        let poly = s.univariate().ok_or(Rejection::Failure)?;
        roots_of(&poly).map_err(|_| Rejection::Failure)?
    } else {
        let table = |lane| {
            let s = sample_keyed(basis, StreamKey::new(seed, trial, lane));
            BivariatePoly::from_table(s.table().expect("two-variable sample").to_vec())
        };
        match roots_bivariate(&table(0), &table(1), StreamKey::new(seed, trial, 2)) {
            Ok(z) => z,
            Err(RootError::NoConvergence(z)) if z.is_complete() => *z,
            Err(_) => return Err(Rejection::Failure),
        }
    };
    if !zs.is_simple() {
        return Err(Rejection::NonSimple);
    }
    if basis.dim() == 2 && !zs.is_complete() {
        return Err(Rejection::Incomplete);
    }
    Ok(zs)
}

/// Runs `f` on trial indices `0, 1, …` until `count` trials are accepted;
/// rejected indices are replaced by fresh ones in index order.
fn collect_trials<T, F>(count: usize, f: F) -> (Vec<T>, TrialCounts)
where
    T: Send,
    F: Fn(u64) -> Result<T, Rejection> + Sync,
{
    let mut out = Vec::with_capacity(count);
    let mut counts = TrialCounts {
        trials: 0,
        attempts: 0,
        failures: 0,
        non_simple: 0,
        incomplete: 0,
    };
    let limit = 4 * count + 64;
    while out.len() < count && counts.attempts < limit {
        let need = (count - out.len()).min(limit - counts.attempts);
        let start = counts.attempts as u64;
        let batch: Vec<Result<T, Rejection>> = (start..start + need as u64).into_par_iter().map(&f).collect();
        counts.attempts += need;
        for r in batch {
            match r {
                Ok(v) => out.push(v),
                Err(Rejection::Failure) => counts.failures += 1,
                Err(Rejection::NonSimple) => counts.non_simple += 1,
                Err(Rejection::Incomplete) => counts.incomplete += 1,
            }
        }
    }
    counts.trials = out.len();
    (out, counts)
}

/// Per-trial observables.
struct TrialStats {
    pairings: Vec<f64>,
    cells: Vec<u32>,
    window: f64,
}

struct Context {
    config: ExperimentConfig,
    spec: EnsembleSpec,
    dictionary: Dictionary,
    indices: Vec<usize>,
    reference_values: Option<Vec<f64>>,
}

impl Context {
    fn new(config: &ExperimentConfig, kind: ExperimentKind) -> Result<Self, McError> {
        let config = config.resolve(Some(kind))?;
        let spec = config.spec()?;
        let dictionary = config.test_functions()?;
        let reference = config.reference_measure()?;
        let reference_values = match reference {
            Some(r) => Some(r.pairings(&dictionary).map_err(|e| McError::Numerical(e.to_string()))?),
            None => None,
        };
        Ok(Context {
            indices: config.dictionary.clone().unwrap_or_default(),
            config,
            spec,
            dictionary,
            reference_values,
        })
    }

    fn basis(&self, degree: u32) -> Result<PolynomialBasis, McError> {
        Ok(build_ensemble(&self.spec.with_degree(degree))?)
    }

    fn report(&self, kind: ExperimentKind) -> ExperimentReport {
        ExperimentReport {
            experiment: kind,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.config.seed,
            config_hash: self.config.hash(),
            config: self.config.clone(),
            degrees: Vec::new(),
            fits: Vec::new(),
            trajectory: None,
            polytope: None,
            flags: Vec::new(),
        }
    }
}

fn normalized_pairings(zeros: &ZeroSet, dict: &Dictionary, degree: u32) -> Vec<f64> {
    dict.iter()
        .map(|phi| {
            pair_points(zeros, phi, degree, zeros.dim)
                .expect("dictionary matches zero-set dimension")
                .normalized
        })
        .collect()
}

/// Fine density grid whose nodes are the centers of `nodes × nodes` cells
/// tiling the window.
fn centered_grid(g: &GridConfig) -> ComplexGrid {
    let h = 2.0 * g.half / g.nodes as f64;
    let axis = Axis::new(-g.half + 0.5 * h, g.half - 0.5 * h, g.nodes);
    ComplexGrid::new(1, vec![axis, axis]).expect("validated grid")
}

fn cell_of(g: &GridConfig, p: &zc_core::Point) -> Option<usize> {
    let w = 2.0 * g.half / g.cells as f64;
    let a = ((p.z.re + g.half) / w).floor();
    let b = ((p.z.im + g.half) / w).floor();
    let n = g.cells as f64;
    (a >= 0.0 && b >= 0.0 && a < n && b < n).then(|| a as usize * g.cells + b as usize)
}

/// Expected zero density on the centered grid of `g` (`m = 1`).
pub fn density_on_window(basis: &PolynomialBasis, g: &GridConfig) -> Result<ExpectedZeroDensity, McError> {
    kernel_density(basis, &centered_grid(g))
}

fn kernel_density(basis: &PolynomialBasis, grid: &ComplexGrid) -> Result<ExpectedZeroDensity, McError> {
    let k = kernel_on_grid(basis, grid).map_err(|e| McError::Numerical(e.to_string()))?;
    expected_density(&k).map_err(|e| McError::Numerical(e.to_string()))
}

/// `N^{−k} ∫ φ E(Z)` and its stencil bound, on the support grid of `φ`.
fn kernel_prediction(
    basis: &PolynomialBasis,
    phi: &TestFunction,
    cells: usize,
    degree: u32,
) -> Result<(f64, f64), McError> {
    let grid = phi.support_grid(cells);
    let d = kernel_density(basis, &grid)?;
    let (v, e) = d.integrate(|p| phi.value(p));
    let scale = (degree as f64).powi(basis.dim() as i32);
    Ok((v / scale, e / scale))
}

fn cell_comparison(
    basis: &PolynomialBasis,
    g: &GridConfig,
    counts: &[Vec<u32>],
    degree: u32,
) -> Result<CellComparison, McError> {
    let grid = centered_grid(g);
    let density = kernel_density(basis, &grid)?;
    let per = g.nodes / g.cells;
    let vol = grid.cell_volume();
    let mut mass = vec![0.0; g.cells * g.cells];
    let mut bound = vec![0.0; g.cells * g.cells];
    for (i, (d, e)) in density.values().iter().zip(density.errors()).enumerate() {
        let m = grid.unflatten(i);
        let c = (m[0] / per) * g.cells + m[1] / per;
        mass[c] += d * vol;
        bound[c] += e * vol;
    }
    let trials = counts.len() as f64;
    let n = degree as f64;
    let width = 2.0 * g.half / g.cells as f64;
    let mut rows = Vec::new();
    for a in 1..g.cells - 1 {
        for b in 1..g.cells - 1 {
            let c = a * g.cells + b;
            let mc = counts.iter().map(|t| t[c] as f64).sum::<f64>() / trials;
            let p = (mc.max(mass[c]) / n).clamp(0.0, 1.0);
            let se = (n * p * (1.0 - p) / trials).sqrt();
            rows.push(CellRow {
                x: -g.half + a as f64 * width,
                y: -g.half + b as f64 * width,
                mc,
                se,
                kernel: mass[c],
                bound: bound[c],
                ok: (mc - mass[c]).abs() <= 3.0 * se + bound[c],
            });
        }
    }
    let passing = rows.iter().filter(|r| r.ok).count();
    Ok(CellComparison {
        half: g.half,
        cells: g.cells,
        interior: rows.len(),
        passing,
        fraction: passing as f64 / rows.len() as f64,
        kernel_mass: rows.iter().map(|r| r.kernel).sum(),
        mc_mass: rows.iter().map(|r| r.mc).sum(),
        rows,
    })
}

fn summarize(ctx: &Context, stats: &[TrialStats]) -> Vec<PairingStats> {
    (0..ctx.indices.len())
        .map(|j| {
            let col: Vec<f64> = stats.iter().map(|t| t.pairings[j]).collect();
            let s = Summary::of(&col);
            let reference = ctx.reference_values.as_ref().map(|r| r[j]);
            PairingStats {
                phi: ctx.indices[j],
                mean: s.mean,
                mean_se: s.mean_se,
                variance: s.variance,
                variance_se: s.variance_se,
                reference,
                kernel: None,
                kernel_error: None,
                reference_ok: reference.map(|r| (s.mean - r).abs() <= 3.0 * s.mean_se),
                kernel_ok: None,
            }
        })
        .collect()
}

fn check_failures(degree: u32, counts: &TrialCounts) -> Result<(), McError> {
    if counts.failures as f64 > MAX_FAILURE_RATE * counts.attempts as f64 || counts.trials == 0 {
        return Err(McError::SolverFailures {
            degree,
            failures: counts.failures,
            attempts: counts.attempts,
        });
    }
    Ok(())
}

/// Trials of one degree with pairings, optional cell counts and the
/// polytope window fraction.
fn run_degree(
    ctx: &Context,
    basis: &PolynomialBasis,
    seed: u64,
    degree: u32,
    trials: usize,
) -> Result<(Vec<TrialStats>, TrialCounts), McError> {
    let grid = ctx.config.grid.filter(|_| basis.dim() == 1);
    let window = ctx.config.window;
    let (stats, counts) = collect_trials(trials, |t| {
        let zs = solve_trial(basis, seed, t)?;
        let mut cells = Vec::new();
        if let Some(g) = &grid {
            cells = vec![0u32; g.cells * g.cells];
            for p in &zs.points {
                if let Some(c) = cell_of(g, p) {
                    cells[c] += 1;
                }
            }
        }
        let window = window.map_or(0.0, |[lo, hi]| {
            let inside = |x: f64| lo <= x && x <= hi;
            let k = zs
                .points
                .iter()
                .filter(|p| inside(p.z.norm()) && inside(p.w.norm()))
                .count();
            k as f64 / zs.len().max(1) as f64
        });
        Ok(TrialStats {
            pairings: normalized_pairings(&zs, &ctx.dictionary, degree),
            cells,
            window,
        })
    });
    Ok((stats, counts))
}

/// Dispatches on the config's experiment kind.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    run_in(global_pool(), config)
}

pub fn run_in(pool: &ThreadPool, config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    let kind = config.kind()?;
    pool.install(|| match kind {
        ExperimentKind::Expectation => run_expectation(config),
        ExperimentKind::Variance => run_variance(config),
        ExperimentKind::Trajectory => run_trajectory(config),
        ExperimentKind::Polytope => run_polytope_concentration(config),
    })
}

/// Monte-Carlo means of `(Ṽ Z, φ)` against the reference measure and the
/// kernel route, plus cell masses against the expected density (`m = 1`).
pub fn run_expectation(config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    let ctx = Context::new(config, ExperimentKind::Expectation)?;
    let mut report = ctx.report(ExperimentKind::Expectation);
    let trials = ctx.config.trial_count();
    let kc = ctx.config.kernel_cells.unwrap_or(200);
    for &degree in &ctx.config.degrees {
        let basis = ctx.basis(degree)?;
        let (stats, counts) = run_degree(
            &ctx,
            &basis,
            derive_seed(ctx.config.seed, degree as u64),
            degree,
            trials,
        )?;
        check_failures(degree, &counts)?;
        let mut pairings = summarize(&ctx, &stats);
        let predictions: Vec<Result<(f64, f64), McError>> = ctx
            .dictionary
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|phi| kernel_prediction(&basis, phi, kc, degree))
            .collect();
        for (p, pred) in pairings.iter_mut().zip(predictions) {
            let (v, e) = pred?;
            p.kernel = Some(v);
            p.kernel_error = Some(e);
            let ok = (p.mean - v).abs() <= 3.0 * p.mean_se + e;
            p.kernel_ok = Some(ok);
            if !ok {
                report.flags.push(format!(
                    "N={degree} phi={}: MC mean departs from kernel prediction",
                    p.phi
                ));
            }
            if p.reference_ok == Some(false) {
                report
                    .flags
                    .push(format!("N={degree} phi={}: MC mean departs from reference", p.phi));
            }
        }
        let cells = match ctx.config.grid.filter(|_| basis.dim() == 1) {
            Some(g) => {
                let counts: Vec<Vec<u32>> = stats.into_iter().map(|t| t.cells).collect();
                let c = cell_comparison(&basis, &g, &counts, degree)?;
                if c.fraction < 0.95 {
                    report
                        .flags
                        .push(format!("N={degree}: {} of {} cells agree", c.passing, c.interior));
                }
                Some(c)
            }
            None => None,
        };
        report.degrees.push(DegreeBlock {
            degree,
            counts,
            pairings,
            cells,
            window_mass: None,
            window_mass_se: None,
        });
    }
    Ok(report)
}

/// Variance of `(Ṽ Z, φ)` per degree and the log-log decay slope.
pub fn run_variance(config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    let ctx = Context::new(config, ExperimentKind::Variance)?;
    let mut report = ctx.report(ExperimentKind::Variance);
    let trials = ctx.config.trial_count();
    for &degree in &ctx.config.degrees {
        let basis = ctx.basis(degree)?;
        let (stats, counts) = run_degree(
            &ctx,
            &basis,
            derive_seed(ctx.config.seed, degree as u64),
            degree,
            trials,
        )?;
        check_failures(degree, &counts)?;
        report.degrees.push(DegreeBlock {
            degree,
            pairings: summarize(&ctx, &stats),
            counts,
            cells: None,
            window_mass: None,
            window_mass_se: None,
        });
    }
    let sharp = matches!(ctx.spec.family, Family::Su) && ctx.spec.dim == 1;
    for (j, phi) in ctx.dictionary.iter().enumerate() {
        let x: Vec<f64> = report.degrees.iter().map(|b| (b.degree as f64).ln()).collect();
        let y: Vec<f64> = report.degrees.iter().map(|b| b.pairings[j].variance.ln()).collect();
        let w: Vec<f64> = report
            .degrees
            .iter()
            .map(|b| (b.counts.trials as f64 - 1.0) / 2.0)
            .collect();
        let Some(fit) = weighted_least_squares(&x, &y, &w).filter(|f| f.slope.is_finite()) else {
            report.flags.push(format!(
                "phi={}: slope fit needs two positive variances",
                ctx.indices[j]
            ));
            continue;
        };
        let (constant_ratio, constant_within_band) = if sharp {
            let l2 = fs_hessian_norms(phi, 400).1;
            let c = ZETA_3 / (4.0 * PI) * l2;
            let r: Vec<f64> = report
                .degrees
                .iter()
                .map(|b| b.pairings[j].variance * (b.degree as f64).powi(3) / c)
                .collect();
            let within = r.last().map(|v| (0.5..=1.5).contains(v));
            (Some(r), within)
        } else {
            (None, None)
        };
        report.fits.push(SlopeFit {
            phi: ctx.indices[j],
            slope: fit.slope,
            intercept: fit.intercept,
            slope_se: fit.slope_se,
            band: [fit.slope - fit.slope_band(), fit.slope + fit.slope_band()],
            constant_ratio,
            constant_within_band,
        });
    }
    Ok(report)
}

/// One seeded sequence `S_N` along the ladder and its deviations from the
/// limit measure.
pub fn run_trajectory(config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    let ctx = Context::new(config, ExperimentKind::Trajectory)?;
    let mut report = ctx.report(ExperimentKind::Trajectory);
    let reference = ctx
        .reference_values
        .clone()
        .expect("resolved trajectory has a reference");
    let degrees = ctx.config.degrees.clone();
    let seed = ctx.config.seed;
    let results: Vec<Result<(DegreeBlock, f64), McError>> = degrees
        .par_iter()
        .map(|&degree| {
            let basis = ctx.basis(degree)?;
            let (stats, counts) = run_degree(&ctx, &basis, derive_seed(seed, degree as u64), degree, 1)?;
            if stats.is_empty() {
                return Err(McError::SolverFailures {
                    degree,
                    failures: counts.failures,
                    attempts: counts.attempts,
                });
            }
            let d = discrepancy(&stats[0].pairings, &reference).map_err(|e| McError::Numerical(e.to_string()))?;
            let block = DegreeBlock {
                degree,
                counts,
                pairings: summarize(&ctx, &stats),
                cells: None,
                window_mass: None,
                window_mass_se: None,
            };
            Ok((block, d))
        })
        .collect();
    let mut deviations = Vec::new();
    let (mut failures, mut attempts) = (0, 0);
    for r in results {
        let (block, d) = r?;
        failures += block.counts.failures;
        attempts += block.counts.attempts;
        report.degrees.push(block);
        deviations.push(d);
    }
    if failures as f64 > MAX_FAILURE_RATE * attempts as f64 {
        return Err(McError::SolverFailures {
            degree: *degrees.last().expect("nonempty ladder"),
            failures,
            attempts,
        });
    }
    let mut tail_sup = deviations.clone();
    for i in (0..tail_sup.len().saturating_sub(1)).rev() {
        tail_sup[i] = tail_sup[i].max(tail_sup[i + 1]);
    }
    let tail_from = ctx.config.tail_from.unwrap_or(degrees[0]);
    let epsilon = ctx.config.epsilon.unwrap_or(0.05);
    let sup_after = degrees
        .iter()
        .zip(&deviations)
        .filter(|(n, _)| **n >= tail_from)
        .map(|(_, d)| *d)
        .fold(0.0, f64::max);
    let x: Vec<f64> = degrees.iter().map(|n| *n as f64).collect();
    if sup_after > epsilon {
        report
            .flags
            .push(format!("sup of deviations from N={tail_from} is {sup_after}"));
    }
    report.trajectory = Some(Trajectory {
        exceed_count: deviations.iter().filter(|d| **d > epsilon).count(),
        spearman: spearman(&x, &deviations),
        degrees,
        deviations,
        tail_sup,
        tail_from,
        sup_after,
        epsilon,
    });
    Ok(report)
}

fn is_unit_simplex(vertices: &[[u32; 2]]) -> bool {
    let mut v = vertices.to_vec();
    v.sort_unstable();
    v.dedup();
    v == [[0, 0], [0, 1], [1, 0]]
}

/// Zeros of Newton-polytope systems: mass in the annular window and, for
/// the unit simplex, agreement with the SU(3) ensemble.
pub fn run_polytope_concentration(config: &ExperimentConfig) -> Result<ExperimentReport, McError> {
    let ctx = Context::new(config, ExperimentKind::Polytope)?;
    let mut report = ctx.report(ExperimentKind::Polytope);
    let trials = ctx.config.trial_count();
    let window = ctx.config.window.expect("resolved polytope has a window");
    let simplex = matches!(&ctx.spec.family, Family::Polytope(v) if is_unit_simplex(v));
    let mut comparisons = Vec::new();
    for &degree in &ctx.config.degrees {
        let basis = ctx.basis(degree)?;
        let seed = derive_seed(ctx.config.seed, degree as u64);
        let (stats, counts) = run_degree(&ctx, &basis, seed, degree, trials)?;
        check_failures(degree, &counts)?;
        let fractions: Vec<f64> = stats.iter().map(|t| t.window).collect();
        let s = Summary::of(&fractions);
        let pairings = summarize(&ctx, &stats);
        if simplex {
            let su = build_ensemble(&EnsembleSpec::new(Family::Su, degree, 2))?;
            let (other, su_counts) = run_degree(&ctx, &su, derive_seed(seed, 1), degree, trials)?;
            check_failures(degree, &su_counts)?;
            for (p, q) in pairings.iter().zip(summarize(&ctx, &other)) {
                let se = (p.mean_se * p.mean_se + q.mean_se * q.mean_se).sqrt();
                let ok = (p.mean - q.mean).abs() <= 3.0 * se;
                if !ok {
                    report
                        .flags
                        .push(format!("N={degree} phi={}: polytope and su3 pairings differ", p.phi));
                }
                comparisons.push(Comparison {
                    against: format!("family=su3 N={degree}"),
                    degree,
                    phi: p.phi,
                    mean: p.mean,
                    other: q.mean,
                    combined_se: se,
                    ok,
                });
            }
        }
        report.degrees.push(DegreeBlock {
            degree,
            counts,
            pairings,
            cells: None,
            window_mass: Some(s.mean),
            window_mass_se: Some(s.mean_se),
        });
    }
    let window_mass: Vec<f64> = report.degrees.iter().filter_map(|b| b.window_mass).collect();
    let non_decreasing = window_mass.windows(2).all(|w| w[1] >= w[0]);
    if !non_decreasing {
        report.flags.push("window mass decreases along the ladder".to_string());
    }
    report.polytope = Some(PolytopeSummary {
        window,
        window_mass,
        non_decreasing,
        comparisons,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collected_trials_are_schedule_independent() {
        let f = |t: u64| {
            if t % 7 == 3 {
                Err(Rejection::NonSimple)
            } else {
                Ok(t * t)
            }
        };
        let (a, ca) = pool_with(1).install(|| collect_trials(40, f));
        let (b, cb) = pool_with(4).install(|| collect_trials(40, f));
        assert_eq!(a, b);
        assert_eq!(ca, cb);
        assert_eq!(ca.trials, 40);
        assert!(ca.non_simple > 0);
        assert!(!a.contains(&9));
    }

    #[test]
    fn unit_simplex_detection() {
        assert!(is_unit_simplex(&[[1, 0], [0, 0], [0, 1]]));
        assert!(!is_unit_simplex(&[[0, 0], [2, 0], [0, 2]]));
    }

    #[test]
    fn cell_lookup() {
        let g = GridConfig {
            half: 2.0,
            nodes: 32,
            cells: 4,
        };
        assert_eq!(
            cell_of(&g, &zc_core::Point::one(zc_core::C64::new(-1.9, -1.9))),
            Some(0)
        );
        assert_eq!(cell_of(&g, &zc_core::Point::one(zc_core::C64::new(1.9, 0.1))), Some(14));
        assert_eq!(cell_of(&g, &zc_core::Point::one(zc_core::C64::new(2.1, 0.0))), None);
    }
}
