//! `stabilize`: run the feedback-perturbed field toward a chosen target
//! set and record the Lyapunov value and the distance to the target.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rattleback::integrate::IntegratorConfig;
use rattleback::model::ModelParams;
use rattleback::stabilize::{beta0, lyapunov_value, run_convergence, PerturbationSpec};
use rattleback::State3;

use super::{resolve_method, state_json, Ctx, Globals};
use crate::config::{pick_f64, pick_usize, FileConfig};
use crate::csvio;
use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "lambda", "variant", "epsilon", "m", "h", "c", "t_end", "tol_abs", "tol_rel",
    "record_every", "x0", "y0", "z0", "seed",
];

/// How far from the dead plane `y = 0` a drawn seed must start, as a
/// fraction of the sphere radius.
const SEED_PLANE_MARGIN: f64 = 0.05;

pub fn run(args: &crate::app::StabilizeArgs, globals: &Globals, cfg: &FileConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    p.require_int()?;

    let variant = args
        .variant
        .clone()
        .or_else(|| cfg.string("variant"))
        .ok_or_else(|| {
            CliError::Invalid(
                "missing required parameter `variant` (equilibria-plus, equilibria-minus, \
                 periodic-orbit, heteroclinic)"
                    .into(),
            )
        })?;
    let epsilon = pick_f64(args.epsilon, cfg, "epsilon", 0.5)?;
    let m = pick_f64(args.m, cfg, "m", 1.0)?;
    let spec = match variant.as_str() {
        "equilibria-plus" => PerturbationSpec::EquilibriaPlus { epsilon, m },
        "equilibria-minus" => PerturbationSpec::EquilibriaMinus { epsilon, m },
        "heteroclinic" => PerturbationSpec::Heteroclinic { epsilon, m },
        "periodic-orbit" => {
            let h = maybe_f64(args.h, cfg, "h")?.ok_or_else(|| {
                CliError::Invalid("periodic-orbit needs `--h` (target energy level)".into())
            })?;
            let c = maybe_f64(args.c, cfg, "c")?.ok_or_else(|| {
                CliError::Invalid("periodic-orbit needs `--c` (target sphere level)".into())
            })?;
            PerturbationSpec::PeriodicOrbit { epsilon, h, c }
        }
        other => {
            return Err(CliError::Invalid(format!(
                "unknown variant `{other}` (expected equilibria-plus, equilibria-minus, \
                 periodic-orbit, heteroclinic)"
            )))
        }
    };
    spec.validate(&p)?;

    let t_end = pick_f64(args.t_end, cfg, "t_end", 200.0)?;
    let record_every = pick_usize(args.record_every, cfg, "record_every", 20)?;
    let method = resolve_method(None, None, args.tol_abs, args.tol_rel, cfg, "rk45")?;
    let icfg = IntegratorConfig { method, t_end, record_every };

    let explicit = [
        maybe_f64(args.x0, cfg, "x0")?,
        maybe_f64(args.y0, cfg, "y0")?,
        maybe_f64(args.z0, cfg, "z0")?,
    ];
    let rng_seed = args.seed.or(cfg.u64("seed")?).unwrap_or(42);
    let (s0, seed_source) = match explicit {
        [Some(x), Some(y), Some(z)] => (State3::new(x, y, z), "explicit"),
        [None, None, None] => (draw_seed(&spec, &p, rng_seed)?, "drawn"),
        _ => {
            return Err(CliError::Invalid(
                "give all three of --x0/--y0/--z0 or none (a seed is drawn then)".into(),
            ))
        }
    };

    let record = run_convergence(s0, &spec, &icfg, &p)?;

    let rows: Vec<Vec<String>> = record
        .times
        .iter()
        .zip(&record.states)
        .zip(record.lyapunov.iter().zip(&record.dist_to_target))
        .map(|((t, s), (l, d))| {
            vec![csvio::f(*t), csvio::f(s.x), csvio::f(s.y), csvio::f(s.z), csvio::f(*l), csvio::f(*d)]
        })
        .collect();

    let params = serde_json::json!({
        "lambda": lambda, "variant": variant, "epsilon": epsilon,
        "m": m, "t_end": t_end, "record_every": record_every,
        "seed": rng_seed, "x0": s0.x, "y0": s0.y, "z0": s0.z,
    });
    let mut ctx = Ctx::create(globals, "stabilize", params)?;
    ctx.write_csv(
        "convergence.csv",
        &["t", "x", "y", "z", "lyapunov", "dist"],
        &rows,
    )?;
    let mut summary = serde_json::json!({
        "variant": spec.label(),
        "epsilon": epsilon,
        "seed_state": state_json(s0),
        "seed_source": seed_source,
        "target_h": spec.target_h(&p)?,
        "target_c": spec.target_c(&p),
        "samples": record.times.len(),
        "final_lyapunov": record.final_lyapunov(),
        "final_distance": record.final_distance(),
        "casimir_drift": record.casimir_drift,
        "targets": record.targets.iter().map(|&t| state_json(t)).collect::<Vec<_>>(),
    });
    if let PerturbationSpec::Heteroclinic { m, .. } = spec {
        summary["basin_threshold"] = serde_json::json!(beta0(m, &p));
    }
    ctx.write_json("summary.json", &summary)?;
    println!(
        "{}: final distance {:.3e}, final Lyapunov {:.3e}",
        spec.label(),
        record.final_distance(),
        record.final_lyapunov()
    );
    ctx.finish()
}

fn maybe_f64(flag: Option<f64>, cfg: &FileConfig, key: &str) -> CliResult<Option<f64>> {
    Ok(flag.or(cfg.f64(key)?))
}

/// Draw a reproducible seed state on the target sphere, away from the
/// dead plane (or, for the connecting-set target, inside its basin).
fn draw_seed(spec: &PerturbationSpec, p: &ModelParams, rng_seed: u64) -> CliResult<State3> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let radius = (2.0 * spec.target_c(p)).sqrt();
    if !(radius > 0.0) {
        return Err(CliError::Invalid("target sphere radius is zero".into()));
    }
    let basin = match *spec {
        PerturbationSpec::Heteroclinic { m, .. } => Some(0.5 * beta0(m, p)),
        _ => None,
    };
    for _ in 0..10_000 {
        let v = State3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let n = v.norm();
        if !(n > 0.1 && n <= 1.0) {
            continue;
        }
        let s = v * (radius / n);
        match basin {
            Some(threshold) => {
                if lyapunov_value(s, spec, p) < threshold {
                    return Ok(s);
                }
            }
            None => {
                if s.y.abs() >= SEED_PLANE_MARGIN * radius {
                    return Ok(s);
                }
            }
        }
    }
    Err(CliError::Invalid(
        "could not draw a seed state; give --x0/--y0/--z0 explicitly".into(),
    ))
}
