//! Command-line harness around the `rattleback` library: integration
//! runs, equilibrium reports, value classification, fiber traces,
//! connecting-arc sampling, matrix-pair checks, feedback runs, and
//! parameter sweeps, each writing a timestamped run directory with a
//! checksummed manifest that the `report` subcommand re-verifies.

pub mod app;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod runs;
pub mod svg;
