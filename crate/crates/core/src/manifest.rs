//! Run manifests and crash-safe output files.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Provenance record written next to every output file as
/// `<output>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// Hex SHA-256 of the configuration bytes the run consumed.
    pub config_digest: String,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_secs: f64,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, config: &[u8], seed: Option<u64>) -> Self {
        Self {
            command_line,
            config_digest: digest_hex(config),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_clock_secs: 0.0,
        }
    }

    pub fn finish(mut self, outputs: Vec<PathBuf>, elapsed: Duration) -> Self {
        self.outputs = outputs;
        self.wall_clock_secs = elapsed.as_secs_f64();
        self
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    /// Writes the manifest beside each of its outputs.
    pub fn write_beside_outputs(&self) -> std::io::Result<()> {
        let body = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
        for out in &self.outputs {
            write_atomic(&Self::path_for(out), &body)?;
        }
        Ok(())
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
