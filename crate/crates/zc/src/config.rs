//! Declarative experiment configuration.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zc_core::currents::Dictionary;
use zc_core::ensemble::{EnsembleSpec, Family};
use zc_core::measures::MeasureName;
use zc_core::reference::ReferenceMeasure;

/// Experiment kinds run by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Expectation,
    Variance,
    Trajectory,
    Polytope,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Expectation => "expectation",
            ExperimentKind::Variance => "variance",
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::Polytope => "polytope",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Window and resolution of density grids (one variable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Half-width of the square window `|Re z|, |Im z| ≤ half`.
    pub half: f64,
    /// Density nodes per axis.
    pub nodes: usize,
    /// Coarse cells per axis for Monte-Carlo binning.
    pub cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half: 2.0,
            nodes: 800,
            cells: 16,
        }
    }
}

/// The configuration document. Optional fields are filled by
/// [`ExperimentConfig::resolve`]; the resolved form is what reports embed
/// and what the hash is taken over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    /// Canonical ensemble text, e.g. `family=su2 N=50`.
    pub ensemble: String,
    /// Degree ladder; defaults to the ensemble's `N`.
    #[serde(default)]
    pub degrees: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Indices into the standard test-function dictionary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Reference measure name, or `none`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    /// Deviation threshold for trajectories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// First degree of the trajectory tail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_from: Option<u32>,
    /// Annulus `lo ≤ |z|, |w| ≤ hi` for polytope concentration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Node count per axis of kernel-route support grids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("key `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Minimal config for `ensemble`.
    pub fn for_ensemble(ensemble: &str) -> Self {
        ExperimentConfig {
            experiment: None,
            ensemble: ensemble.to_string(),
            degrees: Vec::new(),
            trials: None,
            seed: 0,
            dictionary: None,
            grid: None,
            reference: None,
            epsilon: None,
            tail_from: None,
            window: None,
            kernel_cells: None,
            output: None,
        }
    }

    pub fn parse_str(text: &str, path: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: name.clone(),
            source,
        })?;
        Self::parse_str(&text, &name)
    }

    /// Parsed ensemble spec at its base degree.
    pub fn spec(&self) -> Result<EnsembleSpec, ConfigError> {
        EnsembleSpec::from_str(&self.ensemble).map_err(|e| invalid("ensemble", e.to_string()))
    }

    pub fn kind(&self) -> Result<ExperimentKind, ConfigError> {
        self.experiment
            .ok_or_else(|| invalid("experiment", "missing experiment kind"))
    }

    /// Standard dictionary restricted to the selected indices.
    pub fn test_functions(&self) -> Result<Dictionary, ConfigError> {
        let spec = self.spec()?;
        let all = Dictionary::standard(spec.dim);
        match &self.dictionary {
            Some(ix) => all.select(ix).map_err(|e| invalid("dictionary", e.to_string())),
            None => Ok(all),
        }
    }

    pub fn reference_measure(&self) -> Result<Option<ReferenceMeasure>, ConfigError> {
        match self.reference.as_deref() {
            None | Some("none") => Ok(None),
            Some(name) => name
                .parse::<ReferenceMeasure>()
                .map(Some)
                .map_err(|e| invalid("reference", e.to_string())),
        }
    }

    pub fn trial_count(&self) -> usize {
        self.trials.unwrap_or(1)
    }

    /// Fills defaults, canonicalizes the ensemble text and validates the
    /// document for `kind`. Resolution is idempotent.
    pub fn resolve(&self, kind: Option<ExperimentKind>) -> Result<Self, ConfigError> {
        let mut c = self.clone();
        if let (Some(k), Some(own)) = (kind, c.experiment) {
            if k != own {
                return Err(invalid("experiment", format!("config is for `{own}`, not `{k}`")));
            }
        }
        c.experiment = kind.or(c.experiment);
        let spec = c.spec()?;
        c.ensemble = spec.to_string();
        if c.degrees.is_empty() {
            c.degrees = vec![spec.degree];
        }
        if c.degrees.contains(&0) {
            return Err(invalid("degrees", "degrees must be positive"));
        }
        if c.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("degrees", "degree list must be strictly increasing"));
        }
        let trials = c.trials.unwrap_or(match c.experiment {
            Some(ExperimentKind::Trajectory) => 1,
            _ => 200,
        });
        if trials == 0 {
            return Err(invalid("trials", "at least one trial is needed"));
        }
        c.trials = Some(trials);
        let dict_len = Dictionary::standard(spec.dim).len();
        let ix = c.dictionary.clone().unwrap_or_else(|| (0..dict_len).collect());
        if ix.is_empty() || ix.iter().any(|i| *i >= dict_len) {
            return Err(invalid("dictionary", format!("indices must lie in 0..{dict_len}")));
        }
        c.dictionary = Some(ix);
        if c.reference.is_none() {
            c.reference = Some(default_reference(&spec).map_or("none", |r| r.as_str()).to_string());
        }
        if let Some(r) = c.reference_measure()? {
            if r.dim() != spec.dim {
                return Err(invalid("reference", format!("{r} lives in dimension {}", r.dim())));
            }
        }
        if spec.dim == 1 && c.grid.is_none() && c.experiment == Some(ExperimentKind::Expectation) {
            c.grid = Some(GridConfig::default());
        }
        if let Some(g) = c.grid {
            if g.half.is_nan() || g.half <= 0.0 || g.nodes < 16 || g.cells < 2 || g.nodes % g.cells != 0 {
                return Err(invalid(
                    "grid",
                    "need half > 0, nodes ≥ 16 and nodes divisible by cells ≥ 2",
                ));
            }
        }
        if c.kernel_cells.is_none() {
            c.kernel_cells = Some(if spec.dim == 1 { 200 } else { 24 });
        }
        if c.kernel_cells.is_some_and(|k| k < 8) {
            return Err(invalid("kernel_cells", "at least 8 cells"));
        }
        match c.experiment {
            Some(ExperimentKind::Variance) if trials < 2 => {
                return Err(invalid("trials", "variance needs at least 2 trials"));
            }
            Some(ExperimentKind::Trajectory) => {
                if trials != 1 {
                    return Err(invalid("trials", "a trajectory follows a single sequence"));
                }
                if c.degrees.len() < 20 {
                    return Err(invalid("degrees", "a trajectory needs at least 20 degrees"));
                }
                c.epsilon = Some(c.epsilon.unwrap_or(0.05));
                let default_tail = c.degrees[c.degrees.len() * 2 / 3];
                c.tail_from = Some(c.tail_from.unwrap_or(default_tail));
                if c.reference_measure()?.is_none() {
                    return Err(invalid("reference", "a trajectory needs a limit measure"));
                }
            }
            Some(ExperimentKind::Polytope) => {
                if !matches!(spec.family, Family::Polytope(_)) || spec.dim != 2 {
                    return Err(invalid(
                        "ensemble",
                        "polytope experiments need a two-variable polytope family",
                    ));
                }
                let w = c.window.unwrap_or([0.7, 1.4]);
                if !(0.0 <= w[0] && w[0] < w[1]) {
                    return Err(invalid("window", "need 0 ≤ lo < hi"));
                }
                c.window = Some(w);
            }
            _ => {}
        }
        Ok(c)
    }

    /// SHA-256 of the canonical JSON of the resolved config.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Equilibrium measure the normalized zeros of `spec` converge to, when it
/// has a closed form.
pub fn default_reference(spec: &EnsembleSpec) -> Option<ReferenceMeasure> {
    match (&spec.family, spec.dim) {
        (Family::Kac, 1) | (Family::Onb(MeasureName::UnitCircleArc), _) => Some(ReferenceMeasure::CircleUniform),
        (Family::Kac, 2) | (Family::Onb(MeasureName::Torus2d), _) => Some(ReferenceMeasure::TorusUniform2d),
        (Family::Onb(MeasureName::IntervalArcsine), _) | (Family::Onb(MeasureName::IntervalUniform), _) => {
            Some(ReferenceMeasure::IntervalArcsine)
        }
        (Family::Onb(MeasureName::UnitDiskArea), _) => Some(ReferenceMeasure::CircleUniform),
        (Family::Onb(MeasureName::BidiskArea), _) => Some(ReferenceMeasure::TorusUniform2d),
        (Family::Su, 1) => Some(ReferenceMeasure::FubiniStudy),
        (Family::Su, 2) => Some(ReferenceMeasure::FubiniStudy2d),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_is_idempotent_and_canonical() {
        let c = ExperimentConfig::parse_str(r#"{"ensemble": "N=50   family=su2", "seed": 7}"#, "x").unwrap();
        let r = c.resolve(Some(ExperimentKind::Expectation)).unwrap();
        assert_eq!(r.ensemble, "family=su2 N=50");
        assert_eq!(r.reference.as_deref(), Some("fubini-study"));
        assert_eq!(r.resolve(None).unwrap(), r);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(ExperimentConfig::parse_str(&text, "x").unwrap(), r);
    }

    #[test]
    fn hash_ignores_key_order() {
        let a =
            ExperimentConfig::parse_str(r#"{"ensemble": "family=kac N=20", "seed": 3, "trials": 10}"#, "a").unwrap();
        let b =
            ExperimentConfig::parse_str(r#"{"trials": 10, "seed": 3, "ensemble": "family=kac N=20"}"#, "b").unwrap();
        let k = Some(ExperimentKind::Variance);
        assert_eq!(a.resolve(k).unwrap().hash(), b.resolve(k).unwrap().hash());
    }

    #[test]
    fn malformed_config_reports_position() {
        let e = ExperimentConfig::parse_str("{\n  \"ensemble\": \"family=kac N=3\",\n  \"sed\": 1\n}", "bad.json")
            .unwrap_err();
        match e {
            ConfigError::Syntax { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("sed"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_unordered_degrees_and_bad_kinds() {
        let mut c = ExperimentConfig::for_ensemble("family=su2 N=5");
        c.degrees = vec![20, 10];
        assert!(matches!(
            c.resolve(None),
            Err(ConfigError::Invalid { key: "degrees", .. })
        ));
        let c = ExperimentConfig::for_ensemble("family=su2 N=5");
        assert!(c.resolve(Some(ExperimentKind::Polytope)).is_err());
        assert!(ExperimentConfig::for_ensemble("family=nope N=5").resolve(None).is_err());
    }
}
