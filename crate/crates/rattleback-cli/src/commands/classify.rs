//! `classify`: place one invariant value pair (given directly or read
//! off a state) in the stratification of the image, and describe the
//! fiber over it.

use rattleback::ec_map::{self, ECValue, Stratum};
use rattleback::model::ModelParams;
use rattleback::State3;

use super::{state_json, stratum_name, topology_name, Ctx, Globals};
use crate::config::{pick_f64, FileConfig};
use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &["lambda", "h", "c", "x0", "y0", "z0"];

pub fn run(args: &crate::app::ClassifyArgs, globals: &Globals, cfg: &FileConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    p.require_int()?;

    let pair_given = args.h.is_some() || args.c.is_some() || cfg.f64("h")?.is_some() || cfg.f64("c")?.is_some();
    let state_given =
        args.x0.is_some() || args.y0.is_some() || args.z0.is_some() || cfg.f64("x0")?.is_some();
    if pair_given && state_given {
        return Err(CliError::Invalid(
            "give either --h/--c or --x0/--y0/--z0, not both".into(),
        ));
    }

    let (v, source) = if state_given {
        let s = State3::new(
            pick_f64(args.x0, cfg, "x0", 0.0)?,
            pick_f64(args.y0, cfg, "y0", 0.0)?,
            pick_f64(args.z0, cfg, "z0", 0.0)?,
        );
        (ec_map::ec(s, &p), Some(s))
    } else {
        let v = ECValue {
            h: pick_f64(args.h, cfg, "h", 1.0)?,
            c: pick_f64(args.c, cfg, "c", 1.5)?,
        };
        (v, None)
    };

    let stratum = ec_map::classify_value(v, &p);
    let topology = ec_map::fiber_topology(stratum);
    let boundary = if v.c.is_finite() && v.c >= 0.0 {
        Some(ec_map::boundary_value(v.c, &p))
    } else {
        None
    };
    let stable_pair = match stratum {
        Stratum::SigmaPMinus
        | Stratum::SigmaPPlus
        | Stratum::SigmaSMinusStar
        | Stratum::SigmaSPlusStar => {
            let pair = ec_map::stable_equilibria_for(v, &p)?;
            Some(vec![state_json(pair[0].point), state_json(pair[1].point)])
        }
        _ => None,
    };

    let params = serde_json::json!({
        "lambda": lambda,
        "h": v.h,
        "c": v.c,
        "state": source.map(state_json),
    });
    let mut ctx = Ctx::create(globals, "classify", params)?;
    let result = serde_json::json!({
        "h": v.h,
        "c": v.c,
        "stratum": stratum_name(stratum),
        "fiber_topology": topology_name(topology),
        "boundary_value": boundary,
        "stable_pair": stable_pair,
    });
    ctx.write_json("classify.json", &result)?;
    println!(
        "h {:.6e}  c {:.6e}  stratum {}  fiber {}",
        v.h,
        v.c,
        stratum_name(stratum),
        topology_name(topology)
    );
    ctx.finish()
}
