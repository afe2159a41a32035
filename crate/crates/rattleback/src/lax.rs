//! An isospectral matrix pair for the flow: antisymmetric `L(s)` and
//! `B(s)` with `dL/dt = [L, B]` along solutions, so the spectrum of `L`
//! (and every trace power) is a constant of motion.

#[allow(unused_imports)]
use num_traits::Float;

use crate::model::{self, Mat3, ModelParams};
use crate::state::State3;

/// The pair `(L, B)` evaluated at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxPair {
    pub l: Mat3,
    pub b: Mat3,
}

/// Spectral data of `L` at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxInvariants {
    /// `trace(L^2) = -4 (lambda + 1) C`.
    pub trace_l2: f64,
    /// Absolute values of the eigenvalues `{0, +/- i omega}`, ascending.
    pub eig_abs: [f64; 3],
}

/// Build the pair at a state.
///
/// `L` has upper entries `(-x + y*sqrt(lambda), x*sqrt(lambda) + y,
/// z*sqrt(lambda+1))` and `B` has `((-x*sqrt(lambda) + y)*sqrt(lambda+1),
/// 0, z*sqrt(lambda))`, both completed antisymmetrically.
pub fn lax_matrices(s: State3, p: &ModelParams) -> LaxPair {
    let rl = p.lambda().sqrt();
    let rl1 = (p.lambda() + 1.0).sqrt();
    LaxPair {
        l: antisym(-s.x + s.y * rl, s.x * rl + s.y, s.z * rl1),
        b: antisym((-s.x * rl + s.y) * rl1, 0.0, s.z * rl),
    }
}

/// Antisymmetric matrix with upper entries `(m12, m13, m23)`.
fn antisym(m12: f64, m13: f64, m23: f64) -> Mat3 {
    [
        [0.0, m12, m13],
        [-m12, 0.0, m23],
        [-m13, -m23, 0.0],
    ]
}

/// Max-norm defect of the matrix equation, `| dL/dt - (L B - B L) |_max`,
/// with `dL/dt` expanded through the chain rule along the field.
pub fn lax_residual(s: State3, p: &ModelParams) -> f64 {
    let pair = lax_matrices(s, p);
    let f = model::rhs(s, p);
    let rl = p.lambda().sqrt();
    let rl1 = (p.lambda() + 1.0).sqrt();
    let dl = antisym(-f.x + f.y * rl, f.x * rl + f.y, f.z * rl1);
    let commutator = mat_sub(mat_mul(&pair.l, &pair.b), mat_mul(&pair.b, &pair.l));
    let diff = mat_sub(dl, commutator);
    let mut worst = 0.0_f64;
    for row in &diff {
        for &e in row {
            worst = worst.max(e.abs());
        }
    }
    worst
}

/// Spectral invariants of `L` at a state.
///
/// For an antisymmetric 3x3 matrix the eigenvalues are `{0, +/- i omega}`
/// with `omega^2` the sum of the squared upper entries, so the moduli
/// come in closed form.
pub fn isospectral_invariants(s: State3, p: &ModelParams) -> LaxInvariants {
    let pair = lax_matrices(s, p);
    let (a, b, c) = (pair.l[0][1], pair.l[0][2], pair.l[1][2]);
    let omega = (a * a + b * b + c * c).sqrt();
    LaxInvariants { trace_l2: -2.0 * omega * omega, eig_abs: [0.0, omega, omega] }
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn mat_sub(a: Mat3, b: Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

/// Max drift of the sorted eigenvalue moduli along a sequence of states
/// (e.g. a recorded trajectory), relative to the first state.
pub fn eig_drift(states: &[State3], p: &ModelParams) -> f64 {
    let Some(&first) = states.first() else { return 0.0 };
    let base = isospectral_invariants(first, p).eig_abs;
    let mut worst = 0.0_f64;
    for &s in states {
        let cur = isospectral_invariants(s, p).eig_abs;
        for i in 0..3 {
            worst = worst.max((cur[i] - base[i]).abs() / (1.0 + base[i].abs()));
        }
    }
    worst
}

/// Convenience wrapper: residual scaled by the natural cubic growth of
/// the entries, `residual / (1 + |s|^3)`.
pub fn lax_residual_scaled(s: State3, p: &ModelParams) -> f64 {
    let n = s.norm();
    lax_residual(s, p) / (1.0 + n * n * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use crate::model::{casimir, rhs};

    fn p2() -> ModelParams {
        ModelParams::integer(2).unwrap()
    }

    #[test]
    fn matrix_hand_values() {
        let p = p2();
        let s = State3::new(1.0, 2.0, 3.0);
        let pair = lax_matrices(s, &p);
        let s2 = 2.0_f64.sqrt();
        let s3 = 3.0_f64.sqrt();
        assert!((pair.l[0][1] - (2.0 * s2 - 1.0)).abs() < 1e-15);
        assert!((pair.l[0][2] - (s2 + 2.0)).abs() < 1e-15);
        assert!((pair.l[1][2] - 3.0 * s3).abs() < 1e-15);
        assert!((pair.b[0][1] - (2.0 - s2) * s3).abs() < 1e-15);
        assert_eq!(pair.b[0][2], 0.0);
        assert!((pair.b[1][2] - 3.0 * s2).abs() < 1e-15);
        // Antisymmetry.
        for m in [pair.l, pair.b] {
            for i in 0..3 {
                assert_eq!(m[i][i], 0.0);
                for j in 0..3 {
                    assert_eq!(m[i][j], -m[j][i]);
                }
            }
        }
    }

    #[test]
    fn trace_identity() {
        let p = p2();
        let s = State3::new(1.0, 2.0, 3.0);
        let inv = isospectral_invariants(s, &p);
        assert!((inv.trace_l2 - (-84.0)).abs() < 1e-12);
        assert!((inv.trace_l2 + 4.0 * (p.lambda() + 1.0) * casimir(s)).abs() < 1e-12);
    }

    #[test]
    fn residual_vanishes_pointwise() {
        for n in [2_u32, 3, 4, 5, 6] {
            let p = ModelParams::integer(n).unwrap();
            let mut s = State3::new(0.3, -1.2, 0.4);
            for _ in 0..50 {
                // Cheap deterministic scatter through the cube [-2, 2]^3.
                s = State3::new(
                    (s.x * 7.7 + 1.3).sin() * 2.0,
                    (s.y * 5.1 - 0.4).sin() * 2.0,
                    (s.z * 3.9 + 2.1).sin() * 2.0,
                );
                let r = lax_residual(s, &p);
                let bound = 1e-12 * (1.0 + s.norm().powi(3));
                assert!(r < bound, "lambda {n}: residual {r} at {s:?}");
            }
        }
    }

    #[test]
    fn eigenvalue_moduli_follow_the_casimir() {
        let p = p2();
        let s = State3::new(0.7, -0.4, 1.1);
        let inv = isospectral_invariants(s, &p);
        let omega = (2.0 * (p.lambda() + 1.0) * casimir(s)).sqrt();
        assert!((inv.eig_abs[1] - omega).abs() < 1e-12);
        assert_eq!(inv.eig_abs[0], 0.0);
        assert_eq!(inv.eig_abs[1], inv.eig_abs[2]);
    }

    #[test]
    fn spectrum_constant_along_flow() {
        let p = p2();
        let s0 = State3::new(1.0, 1.0, 0.5);
        let cfg = IntegratorConfig::rk4(1e-3, 20.0).with_record_every(20);
        let traj = integrate(s0, |s| rhs(s, &p), &cfg, &p).unwrap();
        let drift = eig_drift(&traj.states, &p);
        assert!(drift < 1e-9, "eigenvalue drift {drift}");
    }
}
