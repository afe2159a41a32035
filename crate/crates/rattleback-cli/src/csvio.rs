//! Minimal CSV writing with full-precision float formatting. Values are
//! written with 17 significant digits so files round-trip exactly and
//! reruns are byte-identical.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Full-precision, locale-independent float formatting.
pub fn f(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = String::with_capacity(rows.len() * 64 + 64);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    w.write_all(out.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}
