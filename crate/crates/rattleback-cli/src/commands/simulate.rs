//! `simulate`: integrate the conservative field, recording the
//! trajectory and the invariant drifts.

use rattleback::integrate::{integrate, IntegratorConfig};
use rattleback::model::{self, ModelParams};
use rattleback::State3;

use super::{method_json, projection_plot, resolve_method, trajectory_rows, Ctx, Globals};
use crate::app::SimulateArgs;
use crate::config::{pick_f64, pick_usize, FileConfig};
use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "lambda", "x0", "y0", "z0", "method", "dt", "tol_abs", "tol_rel", "t_end", "record_every",
];

pub fn run(args: &SimulateArgs, globals: &Globals, cfg: &FileConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    let s0 = State3::new(
        pick_f64(args.x0, cfg, "x0", 1.0)?,
        pick_f64(args.y0, cfg, "y0", 1.2)?,
        pick_f64(args.z0, cfg, "z0", 0.8)?,
    );
    let method = resolve_method(
        args.method.as_deref(),
        args.dt,
        args.tol_abs,
        args.tol_rel,
        cfg,
        "rk45",
    )?;
    let t_end = pick_f64(args.t_end, cfg, "t_end", 10.0)?;
    let record_every = pick_usize(args.record_every, cfg, "record_every", 10)?;
    let icfg = IntegratorConfig { method, t_end, record_every };

    let traj = integrate(s0, |s| model::rhs(s, &p), &icfg, &p)?;

    let params = serde_json::json!({
        "lambda": lambda,
        "state0": super::state_json(s0),
        "method": method_json(&icfg.method),
        "t_end": t_end,
        "record_every": record_every,
    });
    let mut ctx = Ctx::create(globals, "simulate", params)?;
    ctx.write_csv("trajectory.csv", &["t", "x", "y", "z"], &trajectory_rows(&traj.times, &traj.states))?;

    let (t_last, s_last) = traj.last().ok_or_else(|| CliError::Io("empty trajectory".into()))?;
    let summary = serde_json::json!({
        "samples": traj.times.len(),
        "t_final": t_last,
        "state_final": super::state_json(s_last),
        "energy_drift": traj.drift_h,
        "sphere_drift": traj.drift_c,
    });
    ctx.write_json("summary.json", &summary)?;

    if args.plot {
        let svg = projection_plot(
            &format!("trajectory, lambda={lambda}"),
            &[("trajectory", traj.states.clone(), false)],
        );
        ctx.write_text("trajectory.svg", &svg)?;
    }

    println!(
        "samples {}  energy drift {:.3e}  sphere drift {:.3e}",
        traj.times.len(),
        traj.drift_h,
        traj.drift_c
    );
    ctx.finish()
}
