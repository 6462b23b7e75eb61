//! Run manifests: what a command read, wrote and how long it took.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub config_hash: Option<String>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub exit_status: i32,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(dir.join("manifest.json"), text)
    }

    /// True when every listed output exists under `dir`.
    pub fn outputs_exist(&self, dir: &Path) -> bool {
        self.outputs.iter().all(|f| dir.join(f).is_file())
    }
}
