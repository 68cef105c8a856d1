//! Per-run manifests: resolved configuration, input checksums, software
//! version, phase timings and the artifacts written.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{FormatError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseTiming {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputFile>,
    pub timings: Vec<PhaseTiming>,
    pub artifacts: Vec<PathBuf>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| FormatError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            inputs: Vec::new(),
            timings: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(InputFile { path: path.to_path_buf(), sha256 });
        Ok(())
    }

    /// Runs `f` and records its wall-clock time under `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(PhaseTiming { phase: phase.to_string(), seconds: start.elapsed().as_secs_f64() });
        out
    }

    /// Writes `contents` to `path` and declares it as an artifact.
    pub fn write_artifact(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
        fs::write(path, contents).map_err(|e| FormatError::io(path, e))?;
        self.artifacts.push(path.to_path_buf());
        Ok(())
    }

    /// Writes the manifest itself (listed among its own artifacts) to
    /// `dir/manifest.json`.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        self.artifacts.push(path.clone());
        let mut text = serde_json::to_string_pretty(&self).expect("manifests serialize");
        text.push('\n');
        fs::write(&path, text).map_err(|e| FormatError::io(&path, e))?;
        Ok(path)
    }
}
