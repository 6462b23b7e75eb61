use std::path::Path;
use std::process::{Command, Output};

use zc::manifest::RunManifest;
use zc::report::ExperimentReport;
use zc_core::ensemble::{build_ensemble, sample, EnsembleSpec};
use zc_core::grid::ComplexGrid;
use zc_core::rootfind::roots_of;
use zc_core::stats::Summary;

fn zc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zc"))
        .args(args)
        .env("ZC_THREADS", "2")
        .output()
        .expect("zc runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn ensemble_info_reports_cardinality_and_gram_residual() {
    let out = zc(&["ensemble-info", "--ensemble", "family=su2 N=3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["n"], 4);
    assert!(rows[0]["gram_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(zc(&["--help"]).status.code(), Some(0));
    assert_eq!(zc(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(zc(&["expectation"]).status.code(), Some(1));
    let bad = write(
        tmp.path(),
        "bad.json",
        "{\n  \"ensemble\": \"family=kac N=5\",\n  \"sed\": 3\n}\n",
    );
    let r = zc(&["expectation", "--config", &bad, "--out", o]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 3"));
    let missing = tmp.path().join("missing.json");
    assert_eq!(
        zc(&["variance", "--config", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        zc(&["ensemble-info", "--ensemble", "family=kac"]).status.code(),
        Some(1)
    );
    let r = zc(&["sample-zeros", "--ensemble", "family=su3 N=21", "--out", o, "--quiet"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn experiment_writes_report_figure_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "su2.json",
        r#"{"ensemble": "family=su2 N=10", "degrees": [10, 20, 40], "trials": 60, "seed": 3}"#,
    );
    let dir = tmp.path().join("run");
    let d = dir.to_str().unwrap();
    let r = zc(&[
        "variance", "--config", &cfg, "--seed", "7", "--out", d, "--format", "csv", "--quiet",
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let m = manifest(&dir);
    assert_eq!(m.command, "variance");
    assert!(m.outputs_exist(&dir));
    for f in ["report.json", "report.csv", "variance.svg"] {
        assert!(m.outputs.iter().any(|o| o == f), "{f} missing from {:?}", m.outputs);
    }
    let report = ExperimentReport::from_json(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(Some(report.config_hash.clone()), m.config_hash);
    assert_eq!(report.fits.len(), 5);
    assert!(report.fits.iter().all(|f| f.slope < 0.0));
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 5);

    let again = tmp.path().join("again");
    let r = zc(&[
        "variance",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--out",
        again.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.join("report.json")).unwrap(),
        std::fs::read(again.join("report.json")).unwrap()
    );

    let plotted = tmp.path().join("plot");
    let report_path = dir.join("report.json");
    let r = zc(&[
        "plot",
        "--config",
        report_path.to_str().unwrap(),
        "--out",
        plotted.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.join("variance.svg")).unwrap(),
        std::fs::read(plotted.join("variance.svg")).unwrap()
    );
}

#[test]
fn density_csv_mass_matches_root_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "kac50.json",
        r#"{"ensemble": "family=kac N=50", "grid": {"half": 1.5, "nodes": 400, "cells": 16}}"#,
    );
    let dir = tmp.path().join("density");
    let r = zc(&[
        "expected-density",
        "--config",
        &cfg,
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(dir.join("density_N50.csv")).unwrap();
    let h = 3.0 / 400.0;
    let (mut coords, mut mass, mut err) = (Vec::new(), 0.0, 0.0);
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        coords.push((v[0], v[1]));
        mass += v[2] * h * h;
        err += v[3] * h * h;
    }
    assert_eq!(coords.len(), 400 * 400);
    assert!((coords[0].0 + 1.5 - h / 2.0).abs() < 1e-12);

    // Zeros counted on the same cells: nodes within the stencil margin carry no density.
    let lo = -1.5 + h / 2.0;
    let g = ComplexGrid::square(1, 1.5 - h / 2.0, 400).unwrap();
    assert!((g.axes()[0].lo - lo).abs() < 1e-12);
    let b = build_ensemble(&"family=kac N=50".parse::<EnsembleSpec>().unwrap()).unwrap();
    let counts: Vec<f64> = (0..300)
        .map(|t| {
            let z = roots_of(&sample(&b, 8, t).univariate().unwrap()).unwrap();
            z.points
                .iter()
                .filter(|p| g.locate(p).is_some_and(|m| g.is_interior(m, 2)))
                .count() as f64
        })
        .collect();
    let mc = Summary::of(&counts);
    assert!(
        (mc.mean - mass).abs() <= 3.0 * mc.mean_se + err,
        "MC {} ± {} vs density mass {mass} ± {err}",
        mc.mean,
        mc.mean_se
    );
}

#[test]
fn sample_zeros_writes_bezout_many_points() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("zeros");
    let r = zc(&[
        "sample-zeros",
        "--ensemble",
        "family=su3 N=4",
        "--out",
        dir.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(r.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("zeros_N4.csv")).unwrap();
    assert!(csv.starts_with("trial,re_z,im_z,re_w,im_w,residual,multiplicity"));
    assert_eq!(csv.lines().count(), 1 + 16);
    assert!(manifest(&dir).outputs_exist(&dir));
}
