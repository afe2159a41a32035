//! Closed-form heteroclinic orbits connecting the two spin-axis
//! equilibria `(0, 0, -|M|)` and `(0, 0, +|M|)`.
//!
//! All four connecting arcs live in the invariant coordinate planes: two
//! in `x = 0` (where `dz/dt = y^2 > 0`, so they run bottom-to-top) and
//! two in `y = 0` (where `dz/dt = -lambda*x^2 < 0`, top-to-bottom). Along
//! every arc the energy vanishes identically and the Casimir equals
//! `M^2 / 2`.
//!
//! The expressions are evaluated in an exponential form normalized by the
//! dominant term, so large `|M * t|` arguments underflow gracefully
//! instead of overflowing.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams};
use crate::state::State3;

/// Distance tolerance for the asymptotic endpoint check.
pub const LIMIT_TOL: f64 = 1e-8;

/// Family parameters: the spin magnitude `M != 0` and a shift `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HetParams {
    pub m: f64,
    pub k: f64,
}

impl HetParams {
    pub fn new(m: f64, k: f64) -> Result<Self> {
        if m == 0.0 || !m.is_finite() {
            return Err(Error::InvalidParam("M must be nonzero and finite"));
        }
        if !k.is_finite() {
            return Err(Error::InvalidParam("k must be finite"));
        }
        Ok(HetParams { m, k })
    }
}

/// The four connecting arcs, named by the signs of `(x, y)` along them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HetBranch {
    /// `x > 0`, `y = 0`; runs from `+|M|` down to `-|M|`.
    PlusZero,
    /// `x < 0`, `y = 0`; runs from `+|M|` down to `-|M|`.
    MinusZero,
    /// `x = 0`, `y > 0`; runs from `-|M|` up to `+|M|`.
    ZeroPlus,
    /// `x = 0`, `y < 0`; runs from `-|M|` up to `+|M|`.
    ZeroMinus,
}

impl HetBranch {
    pub const ALL: [HetBranch; 4] =
        [HetBranch::PlusZero, HetBranch::MinusZero, HetBranch::ZeroPlus, HetBranch::ZeroMinus];

    pub fn label(self) -> &'static str {
        match self {
            HetBranch::PlusZero => "plus-zero",
            HetBranch::MinusZero => "minus-zero",
            HetBranch::ZeroPlus => "zero-plus",
            HetBranch::ZeroMinus => "zero-minus",
        }
    }
}

/// Evaluate one arc at time `t`.
pub fn het_state(branch: HetBranch, hp: &HetParams, p: &ModelParams, t: f64) -> Result<State3> {
    p.require_int()?;
    if !t.is_finite() {
        return Err(Error::InvalidParam("t must be finite"));
    }
    let a = hp.m.abs();
    let m2 = hp.m * hp.m;
    let s = match branch {
        HetBranch::ZeroPlus | HetBranch::ZeroMinus => {
            // u = |M| (t + k); y = 2 M^2 / (M^2 e^u + e^-u),
            // z = |M| (M^2 e^u - e^-u) / (M^2 e^u + e^-u).
            let u = a * (t + hp.k);
            let w = u.abs();
            let ep = (u - w).exp();
            let en = (-u - w).exp();
            let denom = m2 * ep + en;
            let y = 2.0 * m2 * (-w).exp() / denom;
            let z = a * (m2 * ep - en) / denom;
            let sign = if branch == HetBranch::ZeroPlus { 1.0 } else { -1.0 };
            State3::new(0.0, sign * y, z)
        }
        HetBranch::PlusZero | HetBranch::MinusZero => {
            // q1 = 2|M|k, q2 = 2|M|lambda t;
            // x = 2 M^2 e^((q1+q2)/2) / (M^2 e^q1 + e^q2),
            // z = |M| (M^2 e^q1 - e^q2) / (M^2 e^q1 + e^q2).
            let q1 = 2.0 * a * hp.k;
            let q2 = 2.0 * a * p.lambda() * t;
            let w = q1.max(q2);
            let e1 = (q1 - w).exp();
            let e2 = (q2 - w).exp();
            let denom = m2 * e1 + e2;
            let x = 2.0 * m2 * (0.5 * (q1 + q2) - w).exp() / denom;
            let z = a * (m2 * e1 - e2) / denom;
            let sign = if branch == HetBranch::PlusZero { 1.0 } else { -1.0 };
            State3::new(sign * x, 0.0, z)
        }
    };
    if !s.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(s)
}

/// The exact asymptotic endpoints `(limit at t -> -inf, limit at t -> +inf)`.
///
/// The `x = 0` arcs ascend (z from `-|M|` to `+|M|`); the `y = 0` arcs
/// descend. Either way the unordered endpoint pair is the same.
pub fn expected_limits(branch: HetBranch, hp: &HetParams) -> (State3, State3) {
    let a = hp.m.abs();
    let bottom = State3::new(0.0, 0.0, -a);
    let top = State3::new(0.0, 0.0, a);
    match branch {
        HetBranch::ZeroPlus | HetBranch::ZeroMinus => (bottom, top),
        HetBranch::PlusZero | HetBranch::MinusZero => (top, bottom),
    }
}

/// Evaluate an arc deep in both tails and check it lands on its endpoints
/// (within [`LIMIT_TOL`]); returns the two tail states.
pub fn het_limits(branch: HetBranch, hp: &HetParams, p: &ModelParams) -> Result<(State3, State3)> {
    let t_big = 50.0 / hp.m.abs();
    let early = het_state(branch, hp, p, -t_big)?;
    let late = het_state(branch, hp, p, t_big)?;
    let (lo, hi) = expected_limits(branch, hp);
    let d = early.dist(lo).max(late.dist(hi));
    if d > LIMIT_TOL {
        return Err(Error::LimitDrift { distance: d });
    }
    Ok((early, late))
}

/// Max-norm defect `max_t | d/dt state - field(state) |` over the sample
/// times, with the time derivative taken by fourth-order five-point
/// central differences (step `1e-4`) plus one Richardson extrapolation.
pub fn het_residual(branch: HetBranch, hp: &HetParams, p: &ModelParams, ts: &[f64]) -> Result<f64> {
    let h = 1e-4;
    let mut worst = 0.0_f64;
    for &t in ts {
        let d = richardson_derivative(branch, hp, p, t, h)?;
        let f = model::rhs(het_state(branch, hp, p, t)?, p);
        worst = worst.max((d - f).norm_inf());
    }
    Ok(worst)
}

fn five_point_derivative(
    branch: HetBranch,
    hp: &HetParams,
    p: &ModelParams,
    t: f64,
    h: f64,
) -> Result<State3> {
    let f = |dt: f64| het_state(branch, hp, p, t + dt);
    let (m2, m1, p1, p2) = (f(-2.0 * h)?, f(-h)?, f(h)?, f(2.0 * h)?);
    Ok((m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * h)))
}

fn richardson_derivative(
    branch: HetBranch,
    hp: &HetParams,
    p: &ModelParams,
    t: f64,
    h: f64,
) -> Result<State3> {
    let coarse = five_point_derivative(branch, hp, p, t, h)?;
    let fine = five_point_derivative(branch, hp, p, t, 0.5 * h)?;
    Ok((fine * 16.0 - coarse) * (1.0 / 15.0))
}

/// Max deviations `(max |H|, max |C - M^2/2|)` over the sample times: the
/// arcs lie in the zero-energy fiber on the sphere of radius `|M|`.
pub fn het_fiber_check(
    branch: HetBranch,
    hp: &HetParams,
    p: &ModelParams,
    ts: &[f64],
) -> Result<(f64, f64)> {
    let c_target = 0.5 * hp.m * hp.m;
    let mut worst_h = 0.0_f64;
    let mut worst_c = 0.0_f64;
    for &t in ts {
        let s = het_state(branch, hp, p, t)?;
        worst_h = worst_h.max(model::hamiltonian(s, p).abs());
        worst_c = worst_c.max((model::casimir(s) - c_target).abs());
    }
    Ok((worst_h, worst_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn p2() -> ModelParams {
        ModelParams::integer(2).unwrap()
    }

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn hand_values_at_origin_of_time() {
        let p = p2();
        let hp = HetParams::new(1.0, 0.0).unwrap();
        let s = het_state(HetBranch::ZeroPlus, &hp, &p, 0.0).unwrap();
        assert!(s.dist(State3::new(0.0, 1.0, 0.0)) < 1e-15);
        let s = het_state(HetBranch::ZeroMinus, &hp, &p, 0.0).unwrap();
        assert!(s.dist(State3::new(0.0, -1.0, 0.0)) < 1e-15);
        let s = het_state(HetBranch::PlusZero, &hp, &p, 0.0).unwrap();
        assert!(s.dist(State3::new(1.0, 0.0, 0.0)) < 1e-15);
        let s = het_state(HetBranch::MinusZero, &hp, &p, 0.0).unwrap();
        assert!(s.dist(State3::new(-1.0, 0.0, 0.0)) < 1e-15);

        // M = 2: y(0) = 2*4/5, z(0) = 2*3/5.
        let hp = HetParams::new(2.0, 0.0).unwrap();
        let s = het_state(HetBranch::ZeroPlus, &hp, &p, 0.0).unwrap();
        assert!(s.dist(State3::new(0.0, 1.6, 1.2)) < 1e-15);
    }

    #[test]
    fn arcs_satisfy_the_field() {
        let p = p2();
        let ts = grid(-5.0, 5.0, 100);
        for branch in HetBranch::ALL {
            let hp = HetParams::new(1.0, 0.0).unwrap();
            let r = het_residual(branch, &hp, &p, &ts).unwrap();
            assert!(r < 1e-8, "{}: residual {r}", branch.label());
        }
    }

    #[test]
    fn arcs_satisfy_the_field_across_parameters() {
        let ts = grid(-8.0, 8.0, 80);
        for n in [2_u32, 3, 4] {
            let p = ModelParams::integer(n).unwrap();
            for m in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
                for k in [-1.0, 0.0, 0.7] {
                    let hp = HetParams::new(m, k).unwrap();
                    for branch in HetBranch::ALL {
                        let r = het_residual(branch, &hp, &p, &ts).unwrap();
                        assert!(r < 1e-7, "lambda {n} M {m} k {k} {}: {r}", branch.label());
                    }
                }
            }
        }
    }

    #[test]
    fn arcs_lie_in_the_zero_energy_fiber() {
        let p = p2();
        let ts = grid(-20.0, 20.0, 200);
        for branch in HetBranch::ALL {
            for m in [0.5, 1.0, 2.0] {
                let hp = HetParams::new(m, 0.3).unwrap();
                let (dh, dc) = het_fiber_check(branch, &hp, &p, &ts).unwrap();
                // One coordinate is exactly zero, so H is exactly zero.
                assert_eq!(dh, 0.0);
                assert!(dc < 1e-10, "{}: Casimir deviation {dc}", branch.label());
            }
        }
    }

    #[test]
    fn limits_connect_the_spin_axis_pair() {
        let p = p2();
        for branch in HetBranch::ALL {
            for m in [0.5, 1.0, 2.0, -1.5] {
                let hp = HetParams::new(m, 0.2).unwrap();
                let (early, late) = het_limits(branch, &hp, &p).unwrap();
                let endpoints = [early, late];
                let a = m.abs();
                for target in [State3::new(0.0, 0.0, -a), State3::new(0.0, 0.0, a)] {
                    let hit = endpoints.iter().any(|s| s.dist(target) < LIMIT_TOL);
                    assert!(hit, "{} misses {:?}", branch.label(), target);
                }
            }
        }
    }

    #[test]
    fn ascending_and_descending_orientations() {
        let p = p2();
        let hp = HetParams::new(1.0, 0.0).unwrap();
        let (early, late) = het_limits(HetBranch::ZeroPlus, &hp, &p).unwrap();
        assert!(early.z < 0.0 && late.z > 0.0);
        let (early, late) = het_limits(HetBranch::PlusZero, &hp, &p).unwrap();
        assert!(early.z > 0.0 && late.z < 0.0);
    }

    #[test]
    fn shift_acts_as_time_translation() {
        let p = p2();
        let k = 0.7;
        let shifted = HetParams::new(1.3, k).unwrap();
        let plain = HetParams::new(1.3, 0.0).unwrap();
        for &t in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            // On the x = 0 arcs, k shifts time by +k.
            let a = het_state(HetBranch::ZeroPlus, &shifted, &p, t).unwrap();
            let b = het_state(HetBranch::ZeroPlus, &plain, &p, t + k).unwrap();
            assert!(a.dist(b) < 1e-12);
            // On the y = 0 arcs, k shifts time by -k/lambda.
            let a = het_state(HetBranch::PlusZero, &shifted, &p, t).unwrap();
            let b = het_state(HetBranch::PlusZero, &plain, &p, t - k / p.lambda()).unwrap();
            assert!(a.dist(b) < 1e-12);
        }
    }

    #[test]
    fn deep_tails_do_not_overflow() {
        let p = p2();
        let hp = HetParams::new(1.0, 0.0).unwrap();
        for branch in HetBranch::ALL {
            for t in [-500.0, -350.0, 350.0, 500.0] {
                let s = het_state(branch, &hp, &p, t).unwrap();
                assert!(s.is_finite());
                assert!((s.z.abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(HetParams::new(0.0, 0.0).is_err());
        assert!(HetParams::new(f64::NAN, 0.0).is_err());
        assert!(HetParams::new(1.0, f64::INFINITY).is_err());
        let p = ModelParams::new(2.5).unwrap();
        let hp = HetParams::new(1.0, 0.0).unwrap();
        assert!(het_state(HetBranch::ZeroPlus, &hp, &p, 0.0).is_err());
    }
}
