//! `sweep`: classify a rectangular grid of `(h, c)` values into strata,
//! in parallel, and render the stratification as a heatmap.

use std::collections::BTreeMap;

use rattleback::ec_map::{boundary_value, classify_value, ECValue, Stratum};
use rattleback::model::ModelParams;

use super::{stratum_name, Ctx, Globals};
use crate::config::{pick_f64, pick_usize, FileConfig};
use crate::csvio;
use crate::error::{CliError, CliResult};
use crate::svg::{Canvas, Frame};

const KEYS: &[&str] = &[
    "lambda", "h_min", "h_max", "h_steps", "c_min", "c_max", "c_steps", "threads",
];

pub fn run(args: &crate::app::SweepArgs, globals: &Globals, cfg: &FileConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let lambda = pick_f64(args.lambda, cfg, "lambda", 2.0)?;
    let p = ModelParams::new(lambda)?;
    let h_min = pick_f64(args.h_min, cfg, "h_min", -3.0)?;
    let h_max = pick_f64(args.h_max, cfg, "h_max", 3.0)?;
    let c_min = pick_f64(args.c_min, cfg, "c_min", 0.0)?;
    let c_max = pick_f64(args.c_max, cfg, "c_max", 3.0)?;
    if !(h_max > h_min) || !(c_max > c_min) {
        return Err(CliError::Invalid(format!(
            "need h_max > h_min and c_max > c_min, got h {h_min}..{h_max}, c {c_min}..{c_max}"
        )));
    }
    let h_steps = pick_usize(args.h_steps, cfg, "h_steps", 121)?.max(2);
    let c_steps = pick_usize(args.c_steps, cfg, "c_steps", 121)?.max(2);
    let default_threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let threads = match pick_usize(args.threads, cfg, "threads", 0)? {
        0 => default_threads,
        n => n,
    };

    let hs: Vec<f64> = grid(h_min, h_max, h_steps);
    let cs: Vec<f64> = grid(c_min, c_max, c_steps);

    // One classification job per c-row; rows are handed out in contiguous
    // chunks and each worker writes its own slice, so assembly is
    // deterministic no matter how the threads are scheduled.
    let mut table: Vec<Vec<Stratum>> = vec![Vec::new(); c_steps];
    let chunk = c_steps.div_ceil(threads);
    std::thread::scope(|scope| {
        for (i, rows) in table.chunks_mut(chunk).enumerate() {
            let (hs, cs, p) = (&hs, &cs, &p);
            scope.spawn(move || {
                for (j, row) in rows.iter_mut().enumerate() {
                    let c = cs[i * chunk + j];
                    *row = hs.iter().map(|&h| classify_value(ECValue { h, c }, p)).collect();
                }
            });
        }
    });

    let mut rows = Vec::with_capacity(h_steps * c_steps);
    let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    for (ci, c) in cs.iter().enumerate() {
        for (hi, h) in hs.iter().enumerate() {
            let name = stratum_name(table[ci][hi]);
            *counts.entry(name).or_insert(0) += 1;
            rows.push(vec![csvio::f(*h), csvio::f(*c), name.to_string()]);
        }
    }

    let svg = heatmap(&hs, &cs, &table, &p);
    let params = serde_json::json!({
        "lambda": lambda,
        "h_min": h_min, "h_max": h_max, "h_steps": h_steps,
        "c_min": c_min, "c_max": c_max, "c_steps": c_steps,
    });
    let mut ctx = Ctx::create(globals, "sweep", params)?;
    ctx.write_csv("sweep.csv", &["h", "c", "stratum"], &rows)?;
    ctx.write_text("sweep.svg", &svg)?;
    ctx.write_json(
        "summary.json",
        &serde_json::json!({
            "grid": [h_steps, c_steps],
            "stratum_counts": counts,
        }),
    )?;
    println!("classified {} grid points into {} strata", h_steps * c_steps, counts.len());
    ctx.finish()
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
}

fn fill(s: Stratum) -> &'static str {
    match s {
        Stratum::Outside => "#e8e8e8",
        Stratum::SigmaS0 => "#222222",
        Stratum::SigmaU => "#f2c14e",
        Stratum::SigmaSMinusStar => "#7d3a6f",
        Stratum::SigmaSPlusStar => "#3a7d44",
        Stratum::SigmaPMinus => "#c24d2c",
        Stratum::SigmaPPlus => "#1f6fb2",
    }
}

/// Heatmap of the grid with the image boundary `h = ±b(c)` drawn on top.
/// Runs of equal stratum along each row are merged into single cells to
/// keep the file small.
fn heatmap(hs: &[f64], cs: &[f64], table: &[Vec<Stratum>], p: &ModelParams) -> String {
    let mut canvas = Canvas::new(800, 800);
    let (h_min, h_max) = (hs[0], hs[hs.len() - 1]);
    let (c_min, c_max) = (cs[0], cs[cs.len() - 1]);
    let frame = Frame::new((80.0, 60.0, 620.0, 560.0), (h_min, h_max, c_min, c_max));
    let cell_w = 620.0 / hs.len() as f64;
    let cell_h = 560.0 / cs.len() as f64;
    for (ci, row) in table.iter().enumerate() {
        let mut hi = 0;
        while hi < row.len() {
            let mut end = hi + 1;
            while end < row.len() && row[end] == row[hi] {
                end += 1;
            }
            let (x0, y0) = frame.map(hs[hi], cs[ci]);
            canvas.rect(
                x0 - 0.5 * cell_w,
                y0 - 0.5 * cell_h,
                cell_w * (end - hi) as f64,
                cell_h,
                fill(row[hi]),
            );
            hi = end;
        }
    }
    // Image boundary |h| = sqrt(b(c)): sample c finely, clip to the
    // plotted h range.
    for sign in [1.0, -1.0] {
        let mut pts = Vec::new();
        for i in 0..=600 {
            let c = c_min + (c_max - c_min) * i as f64 / 600.0;
            let h = sign * boundary_value(c, p).sqrt();
            if h.is_finite() && h >= h_min && h <= h_max {
                pts.push(frame.map(h, c));
            }
        }
        canvas.polyline(&pts, "#000000", 1.5, false);
    }
    canvas.text(80.0, 40.0, 14, "stratum map over (h, c)");
    let legend: [Stratum; 7] = [
        Stratum::Outside,
        Stratum::SigmaS0,
        Stratum::SigmaU,
        Stratum::SigmaSMinusStar,
        Stratum::SigmaSPlusStar,
        Stratum::SigmaPMinus,
        Stratum::SigmaPPlus,
    ];
    for (i, s) in legend.into_iter().enumerate() {
        let y = 650.0 + 20.0 * (i / 2) as f64;
        let x = 80.0 + 320.0 * (i % 2) as f64;
        canvas.rect(x, y - 10.0, 14.0, 14.0, fill(s));
        canvas.text(x + 22.0, y + 2.0, 13, stratum_name(s));
    }
    canvas.finish()
}
