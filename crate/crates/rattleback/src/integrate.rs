//! Fixed-step RK4 and adaptive RK45 (Dormand-Prince) integration, plane
//! section crossings, and small-oscillation period measurement.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::state::State3;

/// Hard floor for the adaptive step size.
pub const MIN_STEP: f64 = 1e-14;

/// Root tolerance for refined section-crossing times.
pub const CROSSING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4 { step: f64 },
    /// Dormand-Prince 5(4) with mixed absolute/relative error control.
    Rk45 { tol_abs: f64, tol_rel: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_end: f64,
    /// Keep every n-th accepted step (the endpoints are always kept).
    pub record_every: usize,
}

impl IntegratorConfig {
    /// Fixed-step config; the default for reproducible runs.
    pub fn rk4(step: f64, t_end: f64) -> Self {
        IntegratorConfig { method: Method::Rk4 { step }, t_end, record_every: 1 }
    }

    /// Adaptive config at the default tolerances `1e-10 / 1e-10`.
    pub fn rk45(t_end: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45 { tol_abs: 1e-10, tol_rel: 1e-10 },
            t_end,
            record_every: 1,
        }
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParam("t_end must be positive and finite"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParam("record_every must be positive"));
        }
        match self.method {
            Method::Rk4 { step } => {
                if !(step > 0.0) || !step.is_finite() {
                    return Err(Error::InvalidParam("step must be positive and finite"));
                }
            }
            Method::Rk45 { tol_abs, tol_rel } => {
                if !(tol_abs > 0.0) || !(tol_rel > 0.0) {
                    return Err(Error::InvalidParam("tolerances must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Recorded samples of one integration run.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State3>,
    /// Max `|H - H(0)| / (1 + |H(0)|)` over the samples; NaN when the
    /// energy is undefined (non-integer lambda).
    pub drift_h: f64,
    /// Max `|C - C(0)| / (1 + |C(0)|)` over the samples.
    pub drift_c: f64,
}

impl Trajectory {
    pub fn last(&self) -> Option<(f64, State3)> {
        Some((*self.times.last()?, *self.states.last()?))
    }
}

/// Integrate `ds/dt = field(s)` from `s0` to `cfg.t_end`, recording a
/// strided sample of the accepted steps and the invariant drifts.
pub fn integrate<F>(s0: State3, field: F, cfg: &IntegratorConfig, p: &ModelParams) -> Result<Trajectory>
where
    F: Fn(State3) -> State3,
{
    cfg.validate()?;
    if !s0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }

    let h0 = p.int_lambda().map(|_| model::hamiltonian(s0, p));
    let c0 = model::casimir(s0);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        drift_h: if h0.is_some() { 0.0 } else { f64::NAN },
        drift_c: 0.0,
    };
    let record = |t: f64, s: State3, traj: &mut Trajectory| {
        if let Some(h0) = h0 {
            let dh = (model::hamiltonian(s, p) - h0).abs() / (1.0 + h0.abs());
            traj.drift_h = traj.drift_h.max(dh);
        }
        let dc = (model::casimir(s) - c0).abs() / (1.0 + c0.abs());
        traj.drift_c = traj.drift_c.max(dc);
        traj.times.push(t);
        traj.states.push(s);
    };
    record(0.0, s0, &mut traj);

    match cfg.method {
        Method::Rk4 { step } => {
            let n_steps = (cfg.t_end / step).ceil() as u64;
            let mut s = s0;
            let mut accepted: usize = 0;
            for i in 0..n_steps {
                // The final step is shortened to land exactly on t_end.
                let t = step * i as f64;
                let h = step.min(cfg.t_end - t);
                if h <= 0.0 {
                    break;
                }
                s = rk4_step(s, h, &field);
                if !s.is_finite() {
                    return Err(Error::NonFinite { t: t + h });
                }
                accepted += 1;
                let t_new = if i + 1 == n_steps { cfg.t_end } else { t + h };
                if accepted % cfg.record_every == 0 || i + 1 == n_steps {
                    record(t_new, s, &mut traj);
                }
            }
        }
        Method::Rk45 { tol_abs, tol_rel } => {
            rk45_run(s0, &field, cfg, tol_abs, tol_rel, |t, s| record(t, s, &mut traj))?;
        }
    }
    Ok(traj)
}

fn rk4_step<F: Fn(State3) -> State3>(s: State3, h: f64, field: &F) -> State3 {
    let k1 = field(s);
    let k2 = field(s + k1 * (h / 2.0));
    let k3 = field(s + k2 * (h / 2.0));
    let k4 = field(s + k3 * h);
    s + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk45_run<F, R>(
    s0: State3,
    field: &F,
    cfg: &IntegratorConfig,
    tol_abs: f64,
    tol_rel: f64,
    mut record: R,
) -> Result<()>
where
    F: Fn(State3) -> State3,
    R: FnMut(f64, State3),
{
    let mut t = 0.0;
    let mut s = s0;
    let mut k1 = field(s);
    let mut h = initial_step(s, k1, tol_abs, tol_rel).min(cfg.t_end);
    let mut accepted: usize = 0;

    while t < cfg.t_end {
        h = h.min(cfg.t_end - t);
        if h < MIN_STEP {
            return Err(Error::StepUnderflow { t });
        }

        let mut k = [State3::ZERO; 7];
        k[0] = k1;
        for stage in 0..6 {
            let mut acc = State3::ZERO;
            for j in 0..=stage {
                acc = acc + k[j] * A[stage][j];
            }
            k[stage + 1] = field(s + acc * h);
        }
        let mut s5 = State3::ZERO;
        let mut err = State3::ZERO;
        for j in 0..7 {
            s5 = s5 + k[j] * B5[j];
            err = err + k[j] * (B5[j] - B4[j]);
        }
        let s_new = s + s5 * h;
        let err = err * h;
        if !s_new.is_finite() || !err.is_finite() {
            // Overshot a fast transient; reject and retry much smaller.
            // The underflow guard at the top of the loop stops runaway
            // shrinking when the field itself is non-finite here.
            h *= 0.2;
            continue;
        }

        let scale = |a: f64, b: f64| tol_abs + tol_rel * a.abs().max(b.abs());
        let e = ((err.x / scale(s.x, s_new.x)).powi(2)
            + (err.y / scale(s.y, s_new.y)).powi(2)
            + (err.z / scale(s.z, s_new.z)).powi(2))
        .sqrt()
            / 3.0_f64.sqrt();

        if e <= 1.0 {
            t += h;
            s = s_new;
            k1 = k[6]; // FSAL: last stage is the derivative at the new point.
            accepted += 1;
            if accepted % cfg.record_every == 0 || t >= cfg.t_end {
                record(t, s);
            }
        }
        let factor = if e > 0.0 { 0.9 * e.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(())
}

fn initial_step(s: State3, ds: State3, tol_abs: f64, tol_rel: f64) -> f64 {
    // Crude but serviceable guess; the controller fixes it within a step or two.
    let scale = tol_abs + tol_rel * s.norm();
    let d = ds.norm().max(1e-10);
    (scale / d).powf(0.2).min(1e-2).max(1e6 * MIN_STEP)
}

/// Times of upward crossings (`z = 0`, `dz/dt > 0`) along a recorded
/// trajectory of the base field, refined to [`CROSSING_TOL`] by cubic
/// Hermite interpolation between samples plus a secant polish.
///
/// Needs at least two crossings; the samples must resolve the motion
/// (crossings closer than one sample spacing are merged or lost).
pub fn section_crossings(traj: &Trajectory, p: &ModelParams) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for i in 1..traj.states.len() {
        let (t0, s0) = (traj.times[i - 1], traj.states[i - 1]);
        let (t1, s1) = (traj.times[i], traj.states[i]);
        if !(s0.z < 0.0 && s1.z >= 0.0) {
            continue;
        }
        let h = t1 - t0;
        if h <= 0.0 {
            continue;
        }
        let d0 = model::rhs(s0, p).z * h;
        let d1 = model::rhs(s1, p).z * h;
        let tau = hermite_root(s0.z, d0, s1.z, d1);
        out.push(t0 + tau * h);
    }
    if out.len() < 2 {
        return Err(Error::NoCrossings);
    }
    Ok(out)
}

/// Root of the cubic Hermite interpolant on [0, 1] with endpoint values
/// `z0 < 0 <= z1` and scaled endpoint slopes `d0`, `d1`.
fn hermite_root(z0: f64, d0: f64, z1: f64, d1: f64) -> f64 {
    let eval = |tau: f64| {
        let t2 = tau * tau;
        let t3 = t2 * tau;
        z0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + tau)
            + z1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut flo, mut fhi) = (z0, z1);
    if fhi == 0.0 {
        return 1.0;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let fmid = eval(mid);
        if fmid.abs() <= CROSSING_TOL {
            return mid;
        }
        if (flo < 0.0) == (fmid < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    // Secant polish inside the bisected bracket.
    let mut a = lo;
    let mut fa = flo;
    let mut b = hi;
    let mut fb = fhi;
    for _ in 0..8 {
        if (fb - fa).abs() < f64::MIN_POSITIVE {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        let fc = eval(c.clamp(lo, hi));
        a = b;
        fa = fb;
        b = c.clamp(lo, hi);
        fb = fc;
        if fb.abs() <= CROSSING_TOL {
            break;
        }
    }
    b
}

/// One small-oscillation period measurement around a stable equilibrium.
#[derive(Clone, Copy, Debug)]
pub struct PeriodMeasurement {
    pub m: f64,
    pub amplitude: f64,
    /// Mean gap between consecutive upward section crossings.
    pub measured_period: f64,
    /// Sample standard deviation of the gaps.
    pub gap_std: f64,
    /// Zero-amplitude limit `pi * sqrt(2) / (|M| * sqrt(lambda*(lambda+1)))`.
    pub predicted_limit: f64,
}

/// Zero-amplitude oscillation period around the stable equilibria at
/// parameter `M`.
pub fn period_limit(m: f64, p: &ModelParams) -> f64 {
    let l = p.lambda();
    core::f64::consts::PI * 2.0_f64.sqrt() / (m.abs() * (l * (l + 1.0)).sqrt())
}

/// Measure the oscillation period at a finite amplitude.
///
/// Displaces `(|M|, |M|*sqrt(lambda), 0)` by `amplitude` along the
/// in-sphere direction `(-sqrt(lambda), 1, 0)` (normalized), projects
/// back onto the sphere through the equilibrium, integrates with RK4, and
/// averages at least eight upward-crossing gaps of the plane `z = 0`.
pub fn measure_small_period(m: f64, amplitude: f64, p: &ModelParams) -> Result<PeriodMeasurement> {
    if m == 0.0 || !m.is_finite() {
        return Err(Error::InvalidParam("M must be nonzero and finite"));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidParam("amplitude must be positive and finite"));
    }
    let l = p.lambda();
    let e = State3::new(m.abs(), m.abs() * l.sqrt(), 0.0);
    let r = e.norm();
    let w = State3::new(-l.sqrt(), 1.0, 0.0).normalized().unwrap();
    let s0 = (e + w * amplitude).normalized().unwrap() * r;

    let t_pred = period_limit(m, p);
    let step = (t_pred / 2000.0).min(1e-3);
    let cfg = IntegratorConfig::rk4(step, 13.0 * t_pred);
    let traj = integrate(s0, |s| model::rhs(s, p), &cfg, p)?;
    let crossings = section_crossings(&traj, p)?;
    if crossings.len() < 9 {
        return Err(Error::NoCrossings);
    }
    let gaps: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (gaps.len() - 1) as f64;
    Ok(PeriodMeasurement {
        m,
        amplitude,
        measured_period: mean,
        gap_std: var.sqrt(),
        predicted_limit: t_pred,
    })
}
