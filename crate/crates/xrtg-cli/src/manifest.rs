//! Every run drops a `manifest.json` next to its outputs: the subcommand,
//! its inputs, model ids, seed and a timestamp — enough to reproduce the
//! run exactly (all randomness is seed-driven).

use std::path::Path;

use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;
use xrtg::error::{Error, Result};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Input paths exactly as given on the command line.
    pub inputs: Vec<String>,
    pub model_ids: Vec<String>,
    pub seed: Option<u64>,
    pub output_dir: String,
    /// UTC, RFC 3339. Informational only — reruns differ here by design.
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, out_dir: &Path) -> Self {
        let timestamp = OffsetDateTime::now_utc()
            .format(&Rfc3339)
            .unwrap_or_else(|_| "unknown".to_string());
        RunManifest {
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            model_ids: Vec::new(),
            seed: None,
            output_dir: out_dir.display().to_string(),
            timestamp,
        }
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn model_id(mut self, id: &str) -> Self {
        self.model_ids.push(id.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Serializes into `<dir>/manifest.json`, creating the directory first.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(&path, format!("manifest serialization: {e}")))?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
    }
}
