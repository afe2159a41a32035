//! `equilibria`: enumerate the equilibrium families for a list of
//! parameters and classify each one.

use rattleback::model::{self, ModelParams};

use super::{kind_name, parse_m_list, state_json, Ctx, Globals};
use crate::config::{pick_f64, pick_string, FileConfig};
use crate::csvio;
use crate::error::CliResult;

const KEYS: &[&str] = &["lambda", "m"];

pub fn run(
    args: &crate::app::EquilibriaArgs,
    globals: &Globals,
    cfg: &FileConfig,
) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    p.require_int()?;
    let m_list = parse_m_list(&pick_string(args.m.as_deref(), cfg, "m", "1.0")?)?;

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for e in model::equilibria(&m_list, &p) {
        let report = model::classify_equilibrium(&e, &p)?;
        let verdict = match report.verdict {
            model::Verdict::LyapunovStable => "lyapunov-stable",
            model::Verdict::Unstable => "unstable",
        };
        rows.push(vec![
            kind_name(e.kind).to_string(),
            csvio::f(e.m),
            csvio::f(e.point.x),
            csvio::f(e.point.y),
            csvio::f(e.point.z),
            verdict.to_string(),
        ]);
        let spectrum: Vec<serde_json::Value> = report
            .spectrum
            .iter()
            .map(|ev| serde_json::json!({"re": ev.re, "im": ev.im}))
            .collect();
        let arnold = report.arnold.map(|a| {
            serde_json::json!({
                "multiplier": a.mu,
                "kernel_basis": [state_json(a.kernel_basis[0]), state_json(a.kernel_basis[1])],
                "restricted_hessian": a.restricted_hessian,
                "positive_definite": a.positive_definite,
            })
        });
        entries.push(serde_json::json!({
            "kind": kind_name(e.kind),
            "m": e.m,
            "point": state_json(e.point),
            "verdict": verdict,
            "spectrum": spectrum,
            "arnold": arnold,
        }));
    }

    let params = serde_json::json!({"lambda": lambda, "m": m_list});
    let mut ctx = Ctx::create(globals, "equilibria", params)?;
    ctx.write_csv(
        "equilibria.csv",
        &["kind", "m", "x", "y", "z", "verdict"],
        &rows,
    )?;
    ctx.write_json("equilibria.json", &serde_json::Value::Array(entries))?;
    println!("classified {} equilibria", rows.len());
    ctx.finish()
}
