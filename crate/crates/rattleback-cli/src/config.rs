//! Optional `key = value` configuration files. Flags beat file values,
//! file values beat built-in defaults. Unknown keys are rejected so
//! typos fail loudly.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Invalid(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    idx + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Reject keys that the current command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        let unknown: Vec<&str> = self
            .values
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(format!(
                "unknown config keys for this command: {} (allowed: {})",
                unknown.join(", "),
                allowed.join(", ")
            )))
        }
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        self.parse_with(key, str::parse::<f64>)
    }

    pub fn u64(&self, key: &str) -> CliResult<Option<u64>> {
        self.parse_with(key, str::parse::<u64>)
    }

    pub fn usize(&self, key: &str) -> CliResult<Option<usize>> {
        self.parse_with(key, str::parse::<usize>)
    }

    fn parse_with<T, E: std::fmt::Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => parse(raw)
                .map(Some)
                .map_err(|e| CliError::Invalid(format!("config key `{key}` = `{raw}`: {e}"))),
        }
    }
}

/// Flag > config file > default.
pub fn pick_f64(flag: Option<f64>, cfg: &FileConfig, key: &str, default: f64) -> CliResult<f64> {
    Ok(flag.or(cfg.f64(key)?).unwrap_or(default))
}

pub fn pick_usize(
    flag: Option<usize>,
    cfg: &FileConfig,
    key: &str,
    default: usize,
) -> CliResult<usize> {
    Ok(flag.or(cfg.usize(key)?).unwrap_or(default))
}

pub fn pick_string(
    flag: Option<&str>,
    cfg: &FileConfig,
    key: &str,
    default: &str,
) -> CliResult<String> {
    Ok(flag
        .map(str::to_string)
        .or_else(|| cfg.string(key))
        .unwrap_or_else(|| default.to_string()))
}
