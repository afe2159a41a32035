//! Run-directory management: every data-producing command writes into a
//! fresh directory under the runs root (`--runs-dir` flag, else the
//! `RATTLEBACK_RUNS_DIR` environment variable, else `./runs`).

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub fn runs_root(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_owned();
    }
    if let Some(env) = std::env::var_os("RATTLEBACK_RUNS_DIR") {
        return PathBuf::from(env);
    }
    PathBuf::from("runs")
}

/// Create a fresh directory for one run. `out_dir` overrides the
/// timestamped layout entirely (it must not already exist).
pub fn create_run_dir(
    runs_dir: Option<&Path>,
    out_dir: Option<&Path>,
    command: &str,
) -> CliResult<PathBuf> {
    if let Some(dir) = out_dir {
        if dir.exists() {
            return Err(CliError::Invalid(format!(
                "--out-dir {} already exists",
                dir.display()
            )));
        }
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        return Ok(dir.to_owned());
    }

    let root = runs_root(runs_dir);
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let base = root.join(format!("{stamp}-{command}"));
    let mut dir = base.clone();
    let mut n = 0u32;
    while dir.exists() {
        n += 1;
        dir = PathBuf::from(format!("{}-{n}", base.display()));
    }
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}
