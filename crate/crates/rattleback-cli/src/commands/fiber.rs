//! `fiber`: trace the two-circle level set over an interior value pair
//! by predictor-corrector continuation.

use rattleback::ec_map::{self, ECValue};
use rattleback::model::ModelParams;

use super::{projection_plot, Ctx, Globals};
use crate::config::{pick_f64, FileConfig};
use crate::csvio;
use crate::error::CliResult;

const KEYS: &[&str] = &["lambda", "h", "c", "step"];

pub fn run(args: &crate::app::FiberArgs, globals: &Globals, cfg: &FileConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    p.require_int()?;
    let v = ECValue {
        h: pick_f64(args.h, cfg, "h", 1.0)?,
        c: pick_f64(args.c, cfg, "c", 1.5)?,
    };
    let radius = (2.0 * v.c.max(0.0)).sqrt();
    let step = pick_f64(args.step, cfg, "step", 0.01 * radius.max(1e-6))?;

    let trace = ec_map::trace_fiber(v, &p, step)?;

    let mut rows = Vec::new();
    for (ci, comp) in trace.components.iter().enumerate() {
        for (vi, s) in comp.iter().enumerate() {
            rows.push(vec![
                ci.to_string(),
                vi.to_string(),
                csvio::f(s.x),
                csvio::f(s.y),
                csvio::f(s.z),
            ]);
        }
    }

    let params = serde_json::json!({"lambda": lambda, "h": v.h, "c": v.c, "step": step});
    let mut ctx = Ctx::create(globals, "fiber", params)?;
    ctx.write_csv("fiber.csv", &["component", "vertex", "x", "y", "z"], &rows)?;
    let summary = serde_json::json!({
        "components": trace.components.len(),
        "vertices": trace.components.iter().map(Vec::len).collect::<Vec<_>>(),
        "residual_h": trace.residual_h,
        "residual_c": trace.residual_c,
    });
    ctx.write_json("summary.json", &summary)?;

    if args.plot {
        let curves: Vec<(&str, Vec<rattleback::State3>, bool)> = trace
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let name: &str = if i == 0 { "component 0" } else { "component 1" };
                (name, c.clone(), true)
            })
            .collect();
        let svg = projection_plot(
            &format!("fiber over h={:.4}, c={:.4}, lambda={lambda}", v.h, v.c),
            &curves,
        );
        ctx.write_text("fiber.svg", &svg)?;
    }

    println!(
        "components {}  residual_h {:.3e}  residual_c {:.3e}",
        trace.components.len(),
        trace.residual_h,
        trace.residual_c
    );
    ctx.finish()
}
