//! `report`: verify a finished run directory against its manifest —
//! every listed file must exist and hash to its recorded checksum.

use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex_file, RunManifest};

pub fn run(dir: &Path) -> CliResult<()> {
    let manifest = RunManifest::load(dir)?;
    println!("command: {}", manifest.command);
    println!("recorded: {}", manifest.timestamp);
    let mut bad = Vec::new();
    for name in &manifest.output_files {
        let expected = manifest.checksums.get(name);
        let status = match (expected, sha256_hex_file(&dir.join(name))) {
            (Some(want), Ok(got)) if *want == got => "ok",
            (Some(_), Ok(_)) => "MISMATCH",
            (_, Err(_)) => "MISSING",
            (None, Ok(_)) => "UNLISTED-CHECKSUM",
        };
        if status != "ok" {
            bad.push(name.clone());
        }
        println!("{status:>18}  {name}");
    }
    if bad.is_empty() {
        println!("all {} files verified", manifest.output_files.len());
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "{} file(s) failed verification: {}",
            bad.len(),
            bad.join(", ")
        )))
    }
}
