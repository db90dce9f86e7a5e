//! Run manifests: what was run, on what, and which files came out.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{sha256_hex, write_json};

pub const MANIFEST_FORMAT: &str = "uavsched-manifest";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenario_sha256: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_grid: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    pub threads: usize,
    /// Wall-clock seconds per named phase.
    pub timings: Vec<(String, f64)>,
    pub outputs: Vec<Entry>,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        Self {
            format: MANIFEST_FORMAT.into(),
            version: crate::io::VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args,
            scenario_sha256: Vec::new(),
            algorithm: None,
            alpha_grid: Vec::new(),
            xi: None,
            seeds: Vec::new(),
            threads: rayon::current_num_threads(),
            timings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn time(&mut self, phase: &str, seconds: f64) {
        self.timings.push((phase.into(), seconds));
    }

    /// Hash a written file into the output list.
    pub fn record(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        self.outputs.push(Entry {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// `manifest.json` beside `out`, or inside it when `out` is a directory.
pub fn manifest_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("manifest.json")
    } else {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{stem}.manifest.json"))
    }
}
