//! Error type mapped onto process exit codes: `2` for anything rejected
//! as invalid (bad flags, bad config, domain gates in the library), `1`
//! for IO failures, `3` for a verification mismatch in `report`.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// Rejected input: unusable flag/config values, missing parameters.
    Invalid(String),
    /// The library refused or failed the requested computation.
    Domain(rattleback::Error),
    /// Filesystem or serialization failure.
    Io(String),
    /// `report` found altered, missing, or unlisted outputs.
    Mismatch(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Domain(_) => 2,
            CliError::Io(_) => 1,
            CliError::Mismatch(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "invalid input: {msg}"),
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Mismatch(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rattleback::Error> for CliError {
    fn from(e: rattleback::Error) -> Self {
        CliError::Domain(e)
    }
}
