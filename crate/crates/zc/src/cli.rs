//! The `zc` command.
//!
//! Exit status: 0 on success, 1 for malformed configs or arguments, 2 for
//! numerical failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zc_core::ensemble::build_ensemble;
use zc_core::rootfind::ZeroSet;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::manifest::RunManifest;
use crate::mc::{self, McError};
use crate::report::ExperimentReport;
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "zc", version, about = "Zeros of Gaussian random polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Basis cardinality and Gram residual.
    EnsembleInfo(Common),
    /// Expected zero density on a grid (CSV and SVG heatmap).
    ExpectedDensity(Common),
    /// Zero sets of sampled systems (CSV and SVG scatter).
    SampleZeros(Common),
    /// Monte-Carlo means of normalized pairings.
    Expectation(Common),
    /// Variance decay across a degree ladder.
    Variance(Common),
    /// Single-sequence convergence to the limit measure.
    Trajectory(Common),
    /// Newton-polytope concentration.
    Polytope(Common),
    /// Re-render the figure of an existing report.
    Plot(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (JSON); for `plot`, a report.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ensemble text used when no config is given.
    #[arg(long)]
    ensemble: Option<String>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    fn status(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Config(c) => CliError::Config(c),
            other => CliError::Numerical(format!("mc: {other}")),
        }
    }
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Outputs { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn load_config(c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&c.config, &c.ensemble) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(e)) => ExperimentConfig::for_ensemble(e),
        (None, None) => return Err(CliError::Usage("either --config or --ensemble is required".to_string())),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(c: &Common, cfg: Option<&ExperimentConfig>) -> PathBuf {
    c.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.as_ref()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("zc-out"))
}

/// Parses `args` and runs the command; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let started = Instant::now();
    let (name, common) = match &cli.command {
        Command::EnsembleInfo(c) => ("ensemble-info", c),
        Command::ExpectedDensity(c) => ("expected-density", c),
        Command::SampleZeros(c) => ("sample-zeros", c),
        Command::Expectation(c) => ("expectation", c),
        Command::Variance(c) => ("variance", c),
        Command::Trajectory(c) => ("trajectory", c),
        Command::Polytope(c) => ("polytope", c),
        Command::Plot(c) => ("plot", c),
    };
    let mut manifest = RunManifest {
        command: name.to_string(),
        config_path: common.config.as_ref().map(|p| p.display().to_string()),
        config_hash: None,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
        exit_status: 0,
    };
    let result = dispatch(&cli.command, common, &mut manifest);
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    match result {
        Ok(Some(dir)) => {
            if let Err(e) = manifest.write(&dir) {
                eprintln!("zc: {}: {e}", dir.display());
                return 1;
            }
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("zc {name}: {e}");
            e.status()
        }
    }
}

fn dispatch(command: &Command, c: &Common, manifest: &mut RunManifest) -> Result<Option<PathBuf>, CliError> {
    let kind = match command {
        Command::EnsembleInfo(_) => return ensemble_info(c).map(|_| None),
        Command::ExpectedDensity(_) => return expected_density(c, manifest).map(Some),
        Command::SampleZeros(_) => return sample_zeros(c, manifest).map(Some),
        Command::Plot(_) => return plot(c, manifest).map(Some),
        Command::Expectation(_) => ExperimentKind::Expectation,
        Command::Variance(_) => ExperimentKind::Variance,
        Command::Trajectory(_) => ExperimentKind::Trajectory,
        Command::Polytope(_) => ExperimentKind::Polytope,
    };
    let cfg = load_config(c)?.resolve(Some(kind))?;
    manifest.config_hash = Some(cfg.hash());
    let report = mc::run(&cfg)?;
    let mut out = Outputs::new(out_dir(c, Some(&cfg)))?;
    out.write("report.json", &report.to_json())?;
    if c.format == Format::Csv {
        out.write("report.csv", &report.to_csv())?;
    }
    out.write(&format!("{kind}.svg"), &svg::render_report(&report))?;
    if !c.quiet {
        print!("{}", summary(&report));
    }
    manifest.outputs = out.files;
    Ok(Some(out.dir))
}

fn summary(r: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} (seed {})", r.experiment, r.config.ensemble, r.seed);
    for b in &r.degrees {
        for p in &b.pairings {
            let _ = writeln!(
                s,
                "  N={:<4} phi={} mean={:.6} se={:.2e} var={:.3e}",
                b.degree, p.phi, p.mean, p.mean_se, p.variance
            );
        }
        if let Some(c) = &b.cells {
            let _ = writeln!(s, "  N={:<4} cells agreeing: {}/{}", b.degree, c.passing, c.interior);
        }
        if let Some(m) = b.window_mass {
            let _ = writeln!(s, "  N={:<4} window mass {:.4}", b.degree, m);
        }
    }
    for f in &r.fits {
        let _ = writeln!(s, "  phi={} slope={:.3} ± {:.3}", f.phi, f.slope, 1.96 * f.slope_se);
    }
    if let Some(t) = &r.trajectory {
        let _ = writeln!(s, "  sup d_N for N ≥ {}: {:.4}", t.tail_from, t.sup_after);
    }
    for flag in &r.flags {
        let _ = writeln!(s, "  flag: {flag}");
    }
    s
}

fn ensemble_info(c: &Common) -> Result<(), CliError> {
    let cfg = load_config(c)?.resolve(None)?;
    let spec = cfg.spec()?;
    let mut rows = Vec::new();
    for &n in &cfg.degrees {
        let basis = build_ensemble(&spec.with_degree(n)).map_err(|e| CliError::Numerical(format!("ensemble: {e}")))?;
        rows.push(serde_json::json!({
            "ensemble": spec.with_degree(n).to_string(),
            "dim": basis.dim(),
            "n": basis.len(),
            "gram_residual": basis.gram_residual(),
            "base_locus": basis.base_locus().len(),
        }));
    }
    if c.quiet {
        return Ok(());
    }
    match c.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows).expect("json")),
        Format::Csv => {
            println!("ensemble,n,gram_residual");
            for r in &rows {
                println!(
                    "{},{},{}",
                    r["ensemble"].as_str().unwrap_or(""),
                    r["n"],
                    r["gram_residual"]
                );
            }
        }
    }
    Ok(())
}

fn expected_density(c: &Common, manifest: &mut RunManifest) -> Result<PathBuf, CliError> {
    let mut cfg = load_config(c)?;
    if cfg.grid.is_none() {
        cfg.grid = Some(Default::default());
    }
    let cfg = cfg.resolve(None)?;
    manifest.config_hash = Some(cfg.hash());
    let spec = cfg.spec()?;
    if spec.dim != 1 {
        return Err(CliError::Config(ConfigError::Invalid {
            key: "ensemble",
            message: "density grids are drawn for one variable".to_string(),
        }));
    }
    let g = cfg.grid.expect("grid set above");
    let mut out = Outputs::new(out_dir(c, Some(&cfg)))?;
    for &n in &cfg.degrees {
        let basis = build_ensemble(&spec.with_degree(n)).map_err(|e| CliError::Numerical(format!("ensemble: {e}")))?;
        let d = mc::density_on_window(&basis, &g)?;
        let grid = d.grid();
        let mut csv = String::from("x,y,value,error\n");
        for (i, (v, e)) in d.values().iter().zip(d.errors()).enumerate() {
            let p = grid.point(i);
            let _ = writeln!(csv, "{},{},{},{}", p.z.re, p.z.im, v, e);
        }
        out.write(&format!("density_N{n}.csv"), &csv)?;
        let fig = svg::heatmap(
            &format!("expected zero density, {}", spec.with_degree(n)),
            d.values(),
            g.nodes,
            g.nodes,
            [-g.half, g.half],
            [-g.half, g.half],
        );
        out.write(&format!("density_N{n}.svg"), &fig)?;
        if !c.quiet {
            println!(
                "N={n}: mass in window {:.6} (stencil bound {:.2e})",
                d.mass(),
                d.mass_where(|_| true).1
            );
        }
    }
    manifest.outputs = out.files.clone();
    Ok(out.dir)
}

fn zero_rows(csv: &mut String, trial: u64, z: &ZeroSet) {
    for ((p, r), m) in z.points.iter().zip(&z.residuals).zip(&z.multiplicity) {
        if z.dim == 1 {
            let _ = writeln!(csv, "{trial},{},{},{r},{m}", p.z.re, p.z.im);
        } else {
            let _ = writeln!(csv, "{trial},{},{},{},{},{r},{m}", p.z.re, p.z.im, p.w.re, p.w.im);
        }
    }
}

fn sample_zeros(c: &Common, manifest: &mut RunManifest) -> Result<PathBuf, CliError> {
    let cfg = load_config(c)?.resolve(None)?;
    manifest.config_hash = Some(cfg.hash());
    let spec = cfg.spec()?;
    let trials = cfg.trials.filter(|_| c.config.is_some()).unwrap_or(1) as u64;
    let mut out = Outputs::new(out_dir(c, Some(&cfg)))?;
    for &n in &cfg.degrees {
        let basis = build_ensemble(&spec.with_degree(n)).map_err(|e| CliError::Numerical(format!("ensemble: {e}")))?;
        let mut csv = if spec.dim == 1 {
            String::from("trial,re_z,im_z,residual,multiplicity\n")
        } else {
            String::from("trial,re_z,im_z,re_w,im_w,residual,multiplicity\n")
        };
        let mut pts = Vec::new();
        for t in 0..trials {
            let z = mc::solve_trial(&basis, cfg.seed, t)
                .map_err(|r| CliError::Numerical(format!("rootfind: trial {t} rejected ({r:?})")))?;
            zero_rows(&mut csv, t, &z);
            for p in &z.points {
                pts.push(if spec.dim == 1 {
                    (p.z.re, p.z.im)
                } else {
                    (p.z.norm().ln(), p.w.norm().ln())
                });
            }
        }
        out.write(&format!("zeros_N{n}.csv"), &csv)?;
        let (xl, yl) = if spec.dim == 1 {
            ("Re z", "Im z")
        } else {
            ("log|z|", "log|w|")
        };
        let fig = svg::scatter(&format!("zeros, {}", spec.with_degree(n)), &pts, xl, yl);
        out.write(&format!("zeros_N{n}.svg"), &fig)?;
        if !c.quiet {
            println!("N={n}: {} zeros from {trials} samples", pts.len());
        }
    }
    manifest.outputs = out.files.clone();
    Ok(out.dir)
}

fn plot(c: &Common, manifest: &mut RunManifest) -> Result<PathBuf, CliError> {
    let path: &Path = c
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("plot needs --config REPORT.json".to_string()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let report = ExperimentReport::from_json(&text).map_err(|e| ConfigError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    manifest.config_hash = Some(report.config_hash.clone());
    let mut out = Outputs::new(out_dir(c, Some(&report.config)))?;
    out.write(&format!("{}.svg", report.experiment), &svg::render_report(&report))?;
    manifest.outputs = out.files.clone();
    Ok(out.dir)
}
