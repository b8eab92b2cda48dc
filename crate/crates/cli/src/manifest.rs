//! `manifest.json`, written next to every output so a run can be repeated.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    /// Full command line as invoked.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Resolved configuration after presets, file keys and overrides.
    pub config: serde_json::Value,
    /// Flat TOML accepted back by the same command; `None` for commands
    /// without a config file.
    pub effective_config: Option<String>,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            argv: std::env::args().collect(),
            seed: None,
            workers: None,
            config,
            effective_config: None,
            outputs: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    pub fn finish(mut self, dir: &Path, elapsed: Duration) -> CliResult<PathBuf> {
        self.duration_seconds = elapsed.as_secs_f64();
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
