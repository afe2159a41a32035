//! Dissipative feedback that steers orbits onto chosen invariant sets.
//!
//! The conservative field is augmented with `epsilon * g(s) * K(s)` where
//! `K = grad C x (grad C x grad H)` (rescaled by `y^(lambda-1)` to stay
//! polynomial) is tangent to the Casimir sphere and `g` selects a target
//! energy level. The Casimir is conserved exactly by the perturbed flow
//! while the energy `H` relaxes monotonically toward the target, so a
//! quadratic Lyapunov function in the invariants decays along solutions.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ec_map::{self, ECValue, FiberTrace, Stratum};
use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorConfig};
use crate::model::{self, ModelParams};
use crate::state::State3;

/// Which invariant set the feedback steers toward, with its gain.
///
/// The two equilibrium variants differ by the sign in the gain factor
/// `g = (x y^lambda +/- mag) y^(lambda-1)`: `EquilibriaPlus` (the `+`
/// sign) drives the energy down to `-mag` and `EquilibriaMinus` drives it
/// up to `+mag`, where `mag` is the energy magnitude of the stable
/// equilibria with parameter `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationSpec {
    /// Toward the stable pair with energy `-mag(m)`.
    EquilibriaPlus { epsilon: f64, m: f64 },
    /// Toward the stable pair with energy `+mag(m)`.
    EquilibriaMinus { epsilon: f64, m: f64 },
    /// Toward the two-circle fiber over an interior value pair `(h, c)`.
    PeriodicOrbit { epsilon: f64, h: f64, c: f64 },
    /// Toward the zero-energy connecting set on the sphere `C = m^2 / 2`.
    Heteroclinic { epsilon: f64, m: f64 },
}

impl PerturbationSpec {
    pub fn epsilon(&self) -> f64 {
        match *self {
            PerturbationSpec::EquilibriaPlus { epsilon, .. }
            | PerturbationSpec::EquilibriaMinus { epsilon, .. }
            | PerturbationSpec::PeriodicOrbit { epsilon, .. }
            | PerturbationSpec::Heteroclinic { epsilon, .. } => epsilon,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PerturbationSpec::EquilibriaPlus { .. } => "equilibria-plus",
            PerturbationSpec::EquilibriaMinus { .. } => "equilibria-minus",
            PerturbationSpec::PeriodicOrbit { .. } => "periodic-orbit",
            PerturbationSpec::Heteroclinic { .. } => "heteroclinic",
        }
    }

    /// Check gain and target parameters; the periodic-orbit target must be
    /// an interior value pair (two-circle fiber).
    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        p.require_int()?;
        let eps = self.epsilon();
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParam("gain epsilon must be positive and finite"));
        }
        match *self {
            PerturbationSpec::EquilibriaPlus { m, .. }
            | PerturbationSpec::EquilibriaMinus { m, .. }
            | PerturbationSpec::Heteroclinic { m, .. } => {
                if !m.is_finite() || m == 0.0 {
                    return Err(Error::InvalidParam("target parameter m must be nonzero and finite"));
                }
            }
            PerturbationSpec::PeriodicOrbit { h, c, .. } => {
                if !h.is_finite() || !c.is_finite() {
                    return Err(Error::InvalidParam("target levels h, c must be finite"));
                }
                match ec_map::classify_value(ECValue { h, c }, p) {
                    Stratum::SigmaPMinus | Stratum::SigmaPPlus => {}
                    _ => return Err(Error::WrongStratum),
                }
            }
        }
        Ok(())
    }

    /// Energy level the feedback drives the orbit toward.
    pub fn target_h(&self, p: &ModelParams) -> Result<f64> {
        p.require_int()?;
        Ok(match *self {
            PerturbationSpec::EquilibriaPlus { m, .. } => -target_h_magnitude(m, p),
            PerturbationSpec::EquilibriaMinus { m, .. } => target_h_magnitude(m, p),
            PerturbationSpec::PeriodicOrbit { h, .. } => h,
            PerturbationSpec::Heteroclinic { .. } => 0.0,
        })
    }

    /// Casimir level of the intended limit set. The feedback conserves the
    /// Casimir, so reaching the limit set requires seeding on this level.
    pub fn target_c(&self, p: &ModelParams) -> f64 {
        match *self {
            PerturbationSpec::EquilibriaPlus { m, .. } | PerturbationSpec::EquilibriaMinus { m, .. } => {
                (p.lambda() + 1.0) * m * m / 2.0
            }
            PerturbationSpec::PeriodicOrbit { c, .. } => c,
            PerturbationSpec::Heteroclinic { m, .. } => m * m / 2.0,
        }
    }
}

/// `|H|` at the stable equilibria with parameter `m`:
/// `|m|^(lambda+1) * lambda^(lambda/2)`.
///
/// Panics if the model was not built with an integer exponent.
pub fn target_h_magnitude(m: f64, p: &ModelParams) -> f64 {
    let n = p.require_int().expect("integer lambda required") as i32;
    m.abs().powi(n + 1) * p.lambda().sqrt().powi(n)
}

/// Basin threshold for the connecting-set target: the squared energy of
/// the stable equilibria on the sphere `C = m^2 / 2`,
/// `m^(2 lambda + 2) * lambda^lambda / (lambda + 1)^(lambda + 1)`.
/// Seeds with `H^2` below this value relax onto the connecting set.
///
/// Panics if the model was not built with an integer exponent.
pub fn beta0(m: f64, p: &ModelParams) -> f64 {
    let n = p.require_int().expect("integer lambda required") as i32;
    let l = p.lambda();
    m.powi(2 * n + 2) * l.powi(n) / (l + 1.0).powi(n + 1)
}

/// The polynomial direction field `K` with
/// `grad C x (grad C x grad H) = y^(lambda-1) K`:
/// `K = (y (lambda x^2 - y^2 - z^2), x (-lambda x^2 + y^2 - lambda z^2),
/// (lambda + 1) x y z)`. Orthogonal to `grad C` everywhere.
pub fn bracket_direction(s: State3, p: &ModelParams) -> State3 {
    let l = p.lambda();
    let (x, y, z) = (s.x, s.y, s.z);
    State3::new(
        y * (l * x * x - y * y - z * z),
        x * (-l * x * x + y * y - l * z * z),
        (l + 1.0) * x * y * z,
    )
}

/// The pure dissipative part toward energy level `h_target` (no
/// conservative flow): `(H - h_target) y^(lambda-1) K`.
///
/// Panics if the model was not built with an integer exponent.
pub fn skeleton_field(s: State3, h_target: f64, p: &ModelParams) -> State3 {
    let g = (model::hamiltonian(s, p) - h_target) * p.pow_lambda_m1(s.y);
    bracket_direction(s, p) * g
}

/// The full perturbed field: conservative flow plus
/// `epsilon (H - H_target) y^(lambda-1) K`.
///
/// Panics if the model was not built with an integer exponent.
pub fn perturbed_field(s: State3, spec: &PerturbationSpec, p: &ModelParams) -> State3 {
    let ht = spec.target_h(p).expect("integer lambda required");
    model::rhs(s, p) + skeleton_field(s, ht, p) * spec.epsilon()
}

/// Lyapunov function for the target: `(H - H_t)^2` plus, when the target
/// pins a Casimir level, `(C - C_t)^2`.
///
/// Panics if the model was not built with an integer exponent.
pub fn lyapunov_value(s: State3, spec: &PerturbationSpec, p: &ModelParams) -> f64 {
    let ht = spec.target_h(p).expect("integer lambda required");
    let dh = model::hamiltonian(s, p) - ht;
    match *spec {
        PerturbationSpec::Heteroclinic { .. } => dh * dh,
        _ => {
            let dc = model::casimir(s) - spec.target_c(p);
            dh * dh + dc * dc
        }
    }
}

/// Time derivative of the Lyapunov function along the perturbed flow:
/// a fourth-order finite difference in the flow direction, paired with
/// the closed form
/// `-2 eps (H - H_t)^2 y^(2 lambda - 2)
///  (lambda^2 x^2 z^2 + y^2 z^2 + (y^2 - lambda x^2)^2)`.
/// The two agree to discretization error; the closed form is
/// nonpositive, which is the decay certificate.
///
/// Panics if the model was not built with an integer exponent.
pub fn lie_derivative_check(s: State3, spec: &PerturbationSpec, p: &ModelParams) -> (f64, f64) {
    let x = perturbed_field(s, spec, p);
    let h = 1e-3 / (1.0 + x.norm());
    let lv = |t: f64| lyapunov_value(s + x * t, spec, p);
    let numeric = (-lv(2.0 * h) + 8.0 * lv(h) - 8.0 * lv(-h) + lv(-2.0 * h)) / (12.0 * h);

    let l = p.lambda();
    let ht = spec.target_h(p).expect("integer lambda required");
    let dh = model::hamiltonian(s, p) - ht;
    let ym1 = p.pow_lambda_m1(s.y);
    let (xx, yy, zz) = (s.x * s.x, s.y * s.y, s.z * s.z);
    let bracket = l * l * xx * zz + yy * zz + (yy - l * xx) * (yy - l * xx);
    let closed = -2.0 * spec.epsilon() * dh * dh * ym1 * ym1 * bracket;
    (numeric, closed)
}

/// Distance from `s` to the zero-energy connecting set on the sphere of
/// radius `r`: the nearer of the two great circles cut by the invariant
/// coordinate planes.
pub fn het_skeleton_distance(s: State3, r: f64) -> f64 {
    let r = r.abs();
    let d1 = s.x * s.x + ((s.y * s.y + s.z * s.z).sqrt() - r).powi(2);
    let d2 = s.y * s.y + ((s.x * s.x + s.z * s.z).sqrt() - r).powi(2);
    d1.min(d2).sqrt()
}

/// Sampled history of one feedback run.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub times: Vec<f64>,
    pub states: Vec<State3>,
    pub lyapunov: Vec<f64>,
    pub dist_to_target: Vec<f64>,
    /// Max relative Casimir drift over the run (numerical only; the exact
    /// flow conserves it).
    pub casimir_drift: f64,
    /// For the equilibrium variants, the two predicted limit points.
    pub targets: Vec<State3>,
}

impl ConvergenceRecord {
    pub fn final_distance(&self) -> f64 {
        *self.dist_to_target.last().unwrap_or(&f64::NAN)
    }

    pub fn final_lyapunov(&self) -> f64 {
        *self.lyapunov.last().unwrap_or(&f64::NAN)
    }
}

/// Resolution of the reference polyline used to measure distance to a
/// two-circle fiber target, as a fraction of the sphere radius.
const FIBER_TRACE_STEP_FRACTION: f64 = 0.005;

/// Integrate the perturbed field from `s0` and report the Lyapunov value
/// and the distance to the target set at every recorded sample.
///
/// Seeds outside the guaranteed basin are rejected with `BasinViolation`:
/// for the equilibrium and periodic-orbit targets the plane `y = 0` is
/// invariant and the feedback vanishes on it, so seeds (or recorded
/// states) exactly on it cannot converge; for the connecting-set target
/// the Lyapunov value must start below `beta0(m)`.
pub fn run_convergence(
    s0: State3,
    spec: &PerturbationSpec,
    cfg: &IntegratorConfig,
    p: &ModelParams,
) -> Result<ConvergenceRecord> {
    spec.validate(p)?;
    if !s0.is_finite() {
        return Err(Error::InvalidParam("seed state must be finite"));
    }

    let fiber: Option<FiberTrace> = match *spec {
        PerturbationSpec::Heteroclinic { m, .. } => {
            if lyapunov_value(s0, spec, p) >= beta0(m, p) {
                return Err(Error::BasinViolation);
            }
            None
        }
        PerturbationSpec::PeriodicOrbit { h, c, .. } => {
            if s0.y == 0.0 {
                return Err(Error::BasinViolation);
            }
            let r = (2.0 * c).sqrt();
            Some(ec_map::trace_fiber(ECValue { h, c }, p, FIBER_TRACE_STEP_FRACTION * r)?)
        }
        _ => {
            if s0.y == 0.0 {
                return Err(Error::BasinViolation);
            }
            None
        }
    };

    let targets: Vec<State3> = match *spec {
        PerturbationSpec::EquilibriaPlus { .. } | PerturbationSpec::EquilibriaMinus { .. } => {
            let v = ECValue { h: spec.target_h(p)?, c: spec.target_c(p) };
            ec_map::stable_equilibria_for(v, p)?.iter().map(|e| e.point).collect()
        }
        _ => Vec::new(),
    };

    let traj = integrate(s0, |s| perturbed_field(s, spec, p), cfg, p)?;

    let dead_plane_target = !matches!(spec, PerturbationSpec::Heteroclinic { .. });
    let mut lyapunov = Vec::with_capacity(traj.states.len());
    let mut dist = Vec::with_capacity(traj.states.len());
    for &s in &traj.states {
        if dead_plane_target && s.y == 0.0 {
            return Err(Error::BasinViolation);
        }
        lyapunov.push(lyapunov_value(s, spec, p));
        dist.push(match (*spec, &fiber) {
            (PerturbationSpec::Heteroclinic { m, .. }, _) => het_skeleton_distance(s, m),
            (PerturbationSpec::PeriodicOrbit { .. }, Some(f)) => f.distance_to(s),
            _ => targets.iter().map(|t| t.dist(s)).fold(f64::INFINITY, f64::min),
        });
    }

    Ok(ConvergenceRecord {
        times: traj.times,
        states: traj.states,
        lyapunov,
        dist_to_target: dist,
        casimir_drift: traj.drift_c,
        targets,
    })
}
