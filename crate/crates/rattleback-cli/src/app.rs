//! Argument definitions and dispatch. Every value flag is optional at
//! the parser level; resolution order is flag, then config-file key of
//! the same name, then the built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::FileConfig;
use crate::error::CliResult;

#[derive(Parser, Debug)]
#[command(
    name = "rattleback",
    version,
    about = "Conservative dynamics toolbox: simulate, classify, trace, stabilize, verify"
)]
pub struct Cli {
    /// Root directory that receives run directories
    /// (default: $RATTLEBACK_RUNS_DIR, else ./runs).
    #[arg(long, global = true, value_name = "DIR")]
    pub runs_dir: Option<PathBuf>,

    /// Exact output directory for this run; must not exist yet.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Key = value config file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate the conservative field from an initial state.
    Simulate(SimulateArgs),
    /// Enumerate equilibria for given parameters and report stability.
    Equilibria(EquilibriaArgs),
    /// Classify an invariant value pair (or the values of a state).
    Classify(ClassifyArgs),
    /// Trace the two-circle fiber over an interior value pair.
    Fiber(FiberArgs),
    /// Sample the closed-form connecting arcs between spin-axis points.
    Heteroclinic(HeteroclinicArgs),
    /// Check the isospectral matrix pair along a trajectory.
    LaxCheck(LaxCheckArgs),
    /// Run dissipative feedback toward a chosen invariant set.
    Stabilize(StabilizeArgs),
    /// Classify a grid of value pairs in parallel.
    Sweep(SweepArgs),
    /// Re-verify the checksummed outputs of an earlier run directory.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    /// Model exponent (positive; integer unlocks energy diagnostics).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Initial state coordinates.
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Integrator: rk4 (fixed step) or rk45 (adaptive).
    #[arg(long)]
    pub method: Option<String>,
    /// Fixed step size for rk4.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Absolute error tolerance for rk45.
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Relative error tolerance for rk45.
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Integration end time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Record every n-th accepted step.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Also write projection plots of the trajectory.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Args, Debug, Default)]
pub struct EquilibriaArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated equilibrium parameters, e.g. "1.0,-0.5,2".
    #[arg(long)]
    pub m: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ClassifyArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Energy value of the pair to classify.
    #[arg(long)]
    pub h: Option<f64>,
    /// Sphere value of the pair to classify.
    #[arg(long)]
    pub c: Option<f64>,
    /// Alternatively, classify the values of this state.
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct FiberArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Energy value of the target pair.
    #[arg(long)]
    pub h: Option<f64>,
    /// Sphere value of the target pair.
    #[arg(long)]
    pub c: Option<f64>,
    /// Arc-length step between traced vertices.
    #[arg(long)]
    pub step: Option<f64>,
    /// Also write projection plots of the traced fiber.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Args, Debug, Default)]
pub struct HeteroclinicArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Spin-axis magnitude of the connected pair (nonzero).
    #[arg(long)]
    pub m: Option<f64>,
    /// Time-shift parameter of the arc family.
    #[arg(long)]
    pub k: Option<f64>,
    /// Branch: all, plus-zero, minus-zero, zero-plus, or zero-minus.
    #[arg(long)]
    pub branch: Option<String>,
    /// Start of the sample window.
    #[arg(long)]
    pub t_min: Option<f64>,
    /// End of the sample window.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of samples per branch.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct LaxCheckArgs {
    /// Model exponent (positive).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Initial state coordinates.
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Integration end time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Absolute error tolerance for the adaptive integrator.
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Relative error tolerance for the adaptive integrator.
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Record every n-th accepted step.
    #[arg(long)]
    pub record_every: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct StabilizeArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Target: equilibria-plus, equilibria-minus, periodic-orbit,
    /// or heteroclinic.
    #[arg(long)]
    pub variant: Option<String>,
    /// Feedback gain (positive).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Target parameter for the equilibrium and heteroclinic variants.
    #[arg(long)]
    pub m: Option<f64>,
    /// Target energy for the periodic-orbit variant.
    #[arg(long)]
    pub h: Option<f64>,
    /// Target sphere value for the periodic-orbit variant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Integration end time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Absolute error tolerance for the adaptive integrator.
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Relative error tolerance for the adaptive integrator.
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Record every n-th accepted step.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Explicit seed state (all three must be given together).
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// RNG seed used to draw a seed state when none is given.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// Model exponent (integer at least 2).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub h_min: Option<f64>,
    #[arg(long)]
    pub h_max: Option<f64>,
    /// Number of grid points along the energy axis.
    #[arg(long)]
    pub h_steps: Option<usize>,
    #[arg(long)]
    pub c_min: Option<f64>,
    #[arg(long)]
    pub c_max: Option<f64>,
    /// Number of grid points along the sphere-value axis.
    #[arg(long)]
    pub c_steps: Option<usize>,
    /// Worker threads (0 = one per available core).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Run directory containing manifest.json.
    pub dir: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::empty(),
    };
    let globals = commands::Globals {
        runs_dir: cli.runs_dir.clone(),
        out_dir: cli.out_dir.clone(),
    };
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(&a, &globals, &cfg),
        Command::Equilibria(a) => commands::equilibria::run(&a, &globals, &cfg),
        Command::Classify(a) => commands::classify::run(&a, &globals, &cfg),
        Command::Fiber(a) => commands::fiber::run(&a, &globals, &cfg),
        Command::Heteroclinic(a) => commands::heteroclinic::run(&a, &globals, &cfg),
        Command::LaxCheck(a) => commands::lax_check::run(&a, &globals, &cfg),
        Command::Stabilize(a) => commands::stabilize::run(&a, &globals, &cfg),
        Command::Sweep(a) => commands::sweep::run(&a, &globals, &cfg),
        Command::Report(a) => commands::report::run(&a.dir),
    }
}
