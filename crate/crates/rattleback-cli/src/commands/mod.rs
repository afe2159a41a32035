//! Command implementations plus the shared run context: directory
//! creation, file registration, and manifest writing.

use std::path::PathBuf;

use rattleback::ec_map::{FiberTopology, Stratum};
use rattleback::integrate::Method;
use rattleback::model::EquilibriumKind;
use rattleback::State3;

use crate::config::{pick_f64, pick_string, FileConfig};
use crate::csvio;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::runs;

pub mod classify;
pub mod equilibria;
pub mod fiber;
pub mod heteroclinic;
pub mod lax_check;
pub mod report;
pub mod simulate;
pub mod stabilize;
pub mod sweep;

pub struct Globals {
    pub runs_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// One run in progress: its directory and its growing manifest.
pub struct Ctx {
    pub dir: PathBuf,
    manifest: RunManifest,
}

impl Ctx {
    pub fn create(globals: &Globals, command: &str, parameters: serde_json::Value) -> CliResult<Self> {
        let dir = runs::create_run_dir(
            globals.runs_dir.as_deref(),
            globals.out_dir.as_deref(),
            command,
        )?;
        Ok(Self { dir, manifest: RunManifest::new(command, parameters) })
    }

    pub fn write_text(&mut self, name: &str, content: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
        self.manifest.record(&self.dir, name)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        csvio::write_csv(&self.dir.join(name), header, rows)?;
        self.manifest.record(&self.dir, name)
    }

    pub fn write_json(&mut self, name: &str, value: &serde_json::Value) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.manifest.record(&self.dir, name)
    }

    /// Write the manifest and announce the run directory.
    pub fn finish(mut self) -> CliResult<()> {
        self.manifest.write(&self.dir)?;
        println!("run directory: {}", self.dir.display());
        Ok(())
    }
}

pub fn stratum_name(s: Stratum) -> &'static str {
    match s {
        Stratum::Outside => "outside",
        Stratum::SigmaS0 => "sigma-s0",
        Stratum::SigmaU => "sigma-u",
        Stratum::SigmaSMinusStar => "sigma-s-minus-star",
        Stratum::SigmaSPlusStar => "sigma-s-plus-star",
        Stratum::SigmaPMinus => "sigma-p-minus",
        Stratum::SigmaPPlus => "sigma-p-plus",
    }
}

pub fn topology_name(t: FiberTopology) -> &'static str {
    match t {
        FiberTopology::Empty => "empty",
        FiberTopology::Point => "point",
        FiberTopology::HeteroclinicSet => "heteroclinic-set",
        FiberTopology::TwoPoints => "two-points",
        FiberTopology::TwoCircles => "two-circles",
    }
}

pub fn kind_name(k: EquilibriumKind) -> &'static str {
    match k {
        EquilibriumKind::StablePlus => "stable-plus",
        EquilibriumKind::StableMinus => "stable-minus",
        EquilibriumKind::SpinAxis => "spin-axis",
        EquilibriumKind::Origin => "origin",
    }
}

pub fn state_json(s: State3) -> serde_json::Value {
    serde_json::json!([s.x, s.y, s.z])
}

/// Shared resolution of the integrator choice from `method`, `dt`, and
/// the two tolerances (flag, then config, then defaults).
#[allow(clippy::too_many_arguments)]
pub fn resolve_method(
    method_flag: Option<&str>,
    dt_flag: Option<f64>,
    tol_abs_flag: Option<f64>,
    tol_rel_flag: Option<f64>,
    cfg: &FileConfig,
    default_method: &str,
) -> CliResult<Method> {
    let name = pick_string(method_flag, cfg, "method", default_method)?;
    match name.as_str() {
        "rk4" => Ok(Method::Rk4 { step: pick_f64(dt_flag, cfg, "dt", 1e-3)? }),
        "rk45" => Ok(Method::Rk45 {
            tol_abs: pick_f64(tol_abs_flag, cfg, "tol_abs", 1e-10)?,
            tol_rel: pick_f64(tol_rel_flag, cfg, "tol_rel", 1e-10)?,
        }),
        other => Err(CliError::Invalid(format!(
            "unknown method `{other}` (expected rk4 or rk45)"
        ))),
    }
}

pub fn method_json(m: &Method) -> serde_json::Value {
    match m {
        Method::Rk4 { step } => serde_json::json!({"name": "rk4", "dt": step}),
        Method::Rk45 { tol_abs, tol_rel } => {
            serde_json::json!({"name": "rk45", "tol_abs": tol_abs, "tol_rel": tol_rel})
        }
    }
}

/// Rows of `(t, state)` samples formatted for CSV output.
pub fn trajectory_rows(times: &[f64], states: &[State3]) -> Vec<Vec<String>> {
    times
        .iter()
        .zip(states)
        .map(|(t, s)| vec![csvio::f(*t), csvio::f(s.x), csvio::f(s.y), csvio::f(s.z)])
        .collect()
}

/// Projection panel layout shared by the plotting commands: three
/// coordinate-plane views on one square canvas, plus a caption cell.
pub fn projection_plot(label: &str, curves: &[(&str, Vec<State3>, bool)]) -> String {
    use crate::svg::{data_range, Canvas, Frame};

    let mut canvas = Canvas::new(800, 800);
    let panels: [(&str, fn(State3) -> (f64, f64), (f64, f64, f64, f64)); 3] = [
        ("x-y", |s| (s.x, s.y), (60.0, 40.0, 320.0, 320.0)),
        ("x-z", |s| (s.x, s.z), (440.0, 40.0, 320.0, 320.0)),
        ("y-z", |s| (s.y, s.z), (60.0, 430.0, 320.0, 320.0)),
    ];
    let palette = ["#1f6fb2", "#c24d2c", "#3a7d44", "#7d3a6f"];
    for (axis_label, proj, rect) in panels {
        let xs = curves.iter().flat_map(|(_, pts, _)| pts.iter().map(|&s| proj(s).0));
        let ys = curves.iter().flat_map(|(_, pts, _)| pts.iter().map(|&s| proj(s).1));
        let (xmin, xmax) = data_range(xs);
        let (ymin, ymax) = data_range(ys);
        let frame = Frame::new(rect, (xmin, xmax, ymin, ymax));
        let (px, py, pw, ph) = frame.bounds();
        canvas.rect(px, py, pw, ph, "#f4f4f4");
        for (i, (_, pts, closed)) in curves.iter().enumerate() {
            let mapped: Vec<(f64, f64)> =
                pts.iter().map(|&s| { let (x, y) = proj(s); frame.map(x, y) }).collect();
            canvas.polyline(&mapped, palette[i % palette.len()], 1.2, *closed);
        }
        canvas.text(px, py - 8.0, 14, axis_label);
    }
    canvas.text(440.0, 460.0, 14, label);
    for (i, (name, _, _)) in curves.iter().enumerate() {
        let y = 490.0 + 22.0 * i as f64;
        canvas.rect(440.0, y - 10.0, 14.0, 14.0, palette[i % palette.len()]);
        canvas.text(462.0, y + 2.0, 13, name);
    }
    canvas.finish()
}

pub fn require_positive(value: f64, what: &str) -> CliResult<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Invalid(format!("{what} must be positive and finite, got {value}")))
    }
}

pub fn parse_m_list(raw: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("bad m value `{part}`: {e}")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Invalid("m list is empty".into()));
    }
    Ok(out)
}

