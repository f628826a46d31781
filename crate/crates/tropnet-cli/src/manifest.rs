use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

/// Every run leaves a manifest next to its results: command, echoed
/// configuration, seed, artifact version, timing, and output paths. Enough to
/// re-run the command bit-identically.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub elapsed_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

pub struct ManifestBuilder {
    command: String,
    config: serde_json::Value,
    seed: u64,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config,
            seed,
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    /// Writes a pretty JSON file into the output directory and records it.
    pub fn write_output<T: Serialize>(
        &mut self,
        dir: &Path,
        name: &str,
        value: &T,
    ) -> Result<PathBuf> {
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(value).context("serializing report")?;
        std::fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    /// Writes raw text (CSV or plain) into the output directory.
    pub fn write_text(&mut self, dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
        let path = dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    pub fn finish(self, dir: &Path) -> Result<()> {
        let manifest = RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        std::fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
