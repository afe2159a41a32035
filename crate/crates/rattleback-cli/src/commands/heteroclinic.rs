//! `heteroclinic`: sample the closed-form connecting arcs, verify them
//! against the field, and report their asymptotic endpoints.

use rattleback::heteroclinic::{
    expected_limits, het_fiber_check, het_limits, het_residual, het_state, HetBranch, HetParams,
};
use rattleback::model::ModelParams;

use super::{state_json, Ctx, Globals};
use crate::config::{pick_f64, pick_string, pick_usize, FileConfig};
use crate::csvio;
use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &["lambda", "m", "k", "branch", "t_min", "t_max", "samples"];

pub fn run(
    args: &crate::app::HeteroclinicArgs,
    globals: &Globals,
    cfg: &FileConfig,
) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    p.require_int()?;
    let m = pick_f64(args.m, cfg, "m", 1.0)?;
    let k = pick_f64(args.k, cfg, "k", 0.0)?;
    let hp = HetParams::new(m, k)?;
    let t_min = pick_f64(args.t_min, cfg, "t_min", -8.0)?;
    let t_max = pick_f64(args.t_max, cfg, "t_max", 8.0)?;
    if !(t_max > t_min) {
        return Err(CliError::Invalid(format!("need t_max > t_min, got {t_min}..{t_max}")));
    }
    let samples = pick_usize(args.samples, cfg, "samples", 321)?.max(2);
    let branch_sel = pick_string(args.branch.as_deref(), cfg, "branch", "all")?;
    let branches: Vec<HetBranch> = match branch_sel.as_str() {
        "all" => HetBranch::ALL.to_vec(),
        name => vec![parse_branch(name)?],
    };

    let ts: Vec<f64> = (0..samples)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (samples - 1) as f64)
        .collect();

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &branch in &branches {
        for &t in &ts {
            let s = het_state(branch, &hp, &p, t)?;
            rows.push(vec![
                branch.label().to_string(),
                csvio::f(t),
                csvio::f(s.x),
                csvio::f(s.y),
                csvio::f(s.z),
            ]);
        }
        let residual = het_residual(branch, &hp, &p, &ts)?;
        let (worst_h, worst_c) = het_fiber_check(branch, &hp, &p, &ts)?;
        let (tail_lo, tail_hi) = het_limits(branch, &hp, &p)?;
        let (start, end) = expected_limits(branch, &hp);
        entries.push(serde_json::json!({
            "branch": branch.label(),
            "start": state_json(start),
            "end": state_json(end),
            "endpoint_gap": tail_lo.dist(start).max(tail_hi.dist(end)),
            "max_residual": residual,
            "worst_energy": worst_h,
            "worst_sphere_gap": worst_c,
        }));
    }

    let params = serde_json::json!({
        "lambda": lambda, "m": m, "k": k, "branch": branch_sel,
        "t_min": t_min, "t_max": t_max, "samples": samples,
    });
    let mut ctx = Ctx::create(globals, "heteroclinic", params)?;
    ctx.write_csv("heteroclinic.csv", &["branch", "t", "x", "y", "z"], &rows)?;
    ctx.write_json("summary.json", &serde_json::Value::Array(entries))?;
    println!("sampled {} branches x {} points", branches.len(), samples);
    ctx.finish()
}

fn parse_branch(name: &str) -> CliResult<HetBranch> {
    HetBranch::ALL
        .iter()
        .copied()
        .find(|b| b.label() == name)
        .ok_or_else(|| {
            CliError::Invalid(format!(
                "unknown branch `{name}` (expected all, plus-zero, minus-zero, zero-plus, zero-minus)"
            ))
        })
}
