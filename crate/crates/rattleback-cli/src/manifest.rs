//! Run manifests: every run directory carries a `manifest.json` listing
//! the produced files with SHA-256 checksums, so `report` can later
//! verify that nothing was altered or lost.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub timestamp: String,
    pub tool_version: String,
    pub output_files: Vec<String>,
    pub checksums: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            timestamp: chrono::Utc::now().to_rfc3339(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_files: Vec::new(),
            checksums: BTreeMap::new(),
        }
    }

    /// Register a file that was just written into `dir`.
    pub fn record(&mut self, dir: &Path, name: &str) -> CliResult<()> {
        let digest = sha256_hex_file(&dir.join(name))?;
        self.output_files.push(name.to_string());
        self.checksums.insert(name.to_string(), digest);
        Ok(())
    }

    /// Write `manifest.json` (itself unlisted and unchecksummed).
    pub fn write(&mut self, dir: &Path) -> CliResult<PathBuf> {
        self.output_files.sort();
        let path = dir.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Mismatch(format!("{}: unreadable manifest: {e}", path.display())))
    }
}

pub fn sha256_hex_file(path: &Path) -> CliResult<String> {
    let mut file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("write to string");
    }
    Ok(hex)
}
