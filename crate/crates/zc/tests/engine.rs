use zc::config::{ExperimentConfig, ExperimentKind};
use zc::mc::{self, pool_with, McError};
use zc_core::rng::{real_gaussian, StreamKey};
use zc_core::stats::Summary;

fn config(kind: ExperimentKind, ensemble: &str, degrees: &[u32], trials: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::for_ensemble(ensemble);
    c.experiment = Some(kind);
    c.degrees = degrees.to_vec();
    c.trials = Some(trials);
    c.seed = 21;
    c
}

#[test]
fn resolved_config_round_trips() {
    let c = config(ExperimentKind::Variance, "family=skewed N=10", &[10, 20], 50)
        .resolve(None)
        .unwrap();
    let text = serde_json::to_string_pretty(&c).unwrap();
    let back = ExperimentConfig::parse_str(&text, "round-trip").unwrap();
    assert_eq!(back, c);
    assert_eq!(back.hash(), c.hash());
    assert_eq!(back.resolve(None).unwrap(), c);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let c = config(ExperimentKind::Expectation, "family=onb measure=torus-2d N=3", &[3], 30);
    let one = mc::run_in(&pool_with(1), &c).unwrap();
    let four = mc::run_in(&pool_with(4), &c).unwrap();
    assert_eq!(one.to_json(), four.to_json());
    assert_eq!(one.degrees[0].counts.trials, 30);
}

#[test]
fn variance_estimator_recovers_known_spread() {
    let mut rng = StreamKey::new(4, 0, 0).rng();
    let sigma2: f64 = 2.5;
    let x: Vec<f64> = (0..20_000)
        .map(|_| 1.0 + sigma2.sqrt() * real_gaussian(&mut rng))
        .collect();
    let s = Summary::of(&x);
    assert!((s.mean - 1.0).abs() <= 3.0 * s.mean_se);
    assert!((s.variance - sigma2).abs() <= 3.0 * s.variance_se);
}

#[test]
fn su2_trajectory_trends_downward() {
    let degrees: Vec<u32> = (1..=20).map(|k| 10 * k).collect();
    let mut c = config(ExperimentKind::Trajectory, "family=su2 N=10", &degrees, 1);
    c.tail_from = Some(150);
    let t = mc::run(&c).unwrap().trajectory.unwrap();
    assert!(t.spearman < -0.8, "spearman {}", t.spearman);
}

#[test]
fn kac_kernel_route_agrees_with_monte_carlo() {
    let c = config(ExperimentKind::Expectation, "family=kac N=30", &[30], 400);
    let r = mc::run(&c).unwrap();
    for p in &r.degrees[0].pairings {
        assert_eq!(p.kernel_ok, Some(true), "phi {}: {} vs {:?}", p.phi, p.mean, p.kernel);
    }
}

#[test]
fn invalid_configs_are_config_errors() {
    let bad = config(ExperimentKind::Variance, "family=kac N=10", &[10, 20], 1);
    assert!(matches!(mc::run(&bad), Err(McError::Config(_))));
    let unordered = config(ExperimentKind::Expectation, "family=kac N=10", &[20, 10], 10);
    assert!(matches!(mc::run(&unordered), Err(McError::Config(_))));
}
