//! The energy-Casimir image: stratum classification of value pairs
//! `(h, c)`, the topology of their fibers, and a predictor-corrector
//! tracer for the regular (two-circle) fibers.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{self, Equilibrium, ModelParams};
use crate::state::State3;

/// Default relative tolerance for the boundary comparison `h^2 vs b(c)`.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Absolute residual target of the fiber corrector.
pub const CORRECTOR_TOL: f64 = 1e-11;

/// A value pair of the two invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ECValue {
    pub h: f64,
    pub c: f64,
}

impl ECValue {
    pub const fn new(h: f64, c: f64) -> Self {
        ECValue { h, c }
    }
}

/// Where a value pair sits relative to the image of the invariant map.
///
/// The image is `{c >= 0, h^2 <= b(c)}` with boundary curve
/// `b(c) = lambda^lambda * (2/(lambda+1))^(lambda+1) * c^(lambda+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    /// Not attained by any state.
    Outside,
    /// The vertex `(0, 0)`: only the origin maps there.
    SigmaS0,
    /// `h = 0`, `c > 0`: the spin-axis pair and the connections between them.
    SigmaU,
    /// Boundary arc with `h < 0`: stable equilibria.
    SigmaSMinusStar,
    /// Boundary arc with `h > 0`: stable equilibria.
    SigmaSPlusStar,
    /// Open interior with `h < 0`: pairs of periodic orbits.
    SigmaPMinus,
    /// Open interior with `h > 0`: pairs of periodic orbits.
    SigmaPPlus,
}

/// Topological type of a fiber of the invariant map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberTopology {
    Empty,
    Point,
    TwoPoints,
    TwoCircles,
    /// Two equilibria joined by four connecting arcs.
    HeteroclinicSet,
}

/// Evaluate both invariants at a state.
pub fn ec(s: State3, p: &ModelParams) -> ECValue {
    ECValue { h: model::hamiltonian(s, p), c: model::casimir(s) }
}

/// The boundary curve `b(c)` of the image; `h^2 = b(c)` exactly at the
/// stable equilibria on the sphere of Casimir level `c`.
pub fn boundary_value(c: f64, p: &ModelParams) -> f64 {
    let l = p.lambda();
    match p.int_lambda() {
        // Integer powers stay exact for the exactly representable cases.
        Some(n) => {
            let n = n as i32;
            l.powi(n) * (2.0 / (l + 1.0)).powi(n + 1) * c.powi(n + 1)
        }
        None => l.powf(l) * (2.0 / (l + 1.0)).powf(l + 1.0) * c.powf(l + 1.0),
    }
}

/// Classify a value pair with the default boundary tolerance.
pub fn classify_value(v: ECValue, p: &ModelParams) -> Stratum {
    classify_value_tol(v, p, CLASSIFY_TOL)
}

/// Classify a value pair; ties within `tol * b(c)` of the boundary
/// resolve to the boundary strata.
pub fn classify_value_tol(v: ECValue, p: &ModelParams, tol: f64) -> Stratum {
    if !v.h.is_finite() || !v.c.is_finite() || v.c < 0.0 {
        return Stratum::Outside;
    }
    if v.h == 0.0 && v.c == 0.0 {
        return Stratum::SigmaS0;
    }
    if v.c == 0.0 {
        return Stratum::Outside;
    }
    if v.h == 0.0 {
        return Stratum::SigmaU;
    }
    let b = boundary_value(v.c, p);
    let h2 = v.h * v.h;
    if h2 > b * (1.0 + tol) {
        Stratum::Outside
    } else if h2 >= b * (1.0 - tol) {
        if v.h > 0.0 {
            Stratum::SigmaSPlusStar
        } else {
            Stratum::SigmaSMinusStar
        }
    } else if v.h > 0.0 {
        Stratum::SigmaPPlus
    } else {
        Stratum::SigmaPMinus
    }
}

/// Fiber type over each stratum.
pub fn fiber_topology(s: Stratum) -> FiberTopology {
    match s {
        Stratum::Outside => FiberTopology::Empty,
        Stratum::SigmaS0 => FiberTopology::Point,
        Stratum::SigmaU => FiberTopology::HeteroclinicSet,
        Stratum::SigmaSMinusStar | Stratum::SigmaSPlusStar => FiberTopology::TwoPoints,
        Stratum::SigmaPMinus | Stratum::SigmaPPlus => FiberTopology::TwoCircles,
    }
}

/// The two stable equilibria associated with a value pair `(h, c)` with
/// `c > 0`, `h != 0` inside or on the boundary of the image.
///
/// Both returned points lie on the sphere of level `c` and have energy of
/// the sign of `h`; which mirror pair that is depends on the parity of
/// `lambda` (for even `lambda` energy flips under the antipodal map, for
/// odd `lambda` under `y -> -y`).
pub fn stable_equilibria_for(v: ECValue, p: &ModelParams) -> Result<[Equilibrium; 2]> {
    let n = p.require_int()?;
    match classify_value(v, p) {
        Stratum::SigmaPMinus | Stratum::SigmaPPlus | Stratum::SigmaSMinusStar | Stratum::SigmaSPlusStar => {}
        _ => return Err(Error::WrongStratum),
    }
    let l = p.lambda();
    let m = (2.0 * v.c / (l + 1.0)).sqrt();
    let pair = if n % 2 == 0 {
        if v.h > 0.0 {
            [Equilibrium::stable_minus(m, p), Equilibrium::stable_plus(m, p)]
        } else {
            [Equilibrium::stable_minus(-m, p), Equilibrium::stable_plus(-m, p)]
        }
    } else if v.h > 0.0 {
        [Equilibrium::stable_plus(m, p), Equilibrium::stable_plus(-m, p)]
    } else {
        [Equilibrium::stable_minus(m, p), Equilibrium::stable_minus(-m, p)]
    };
    Ok(pair)
}

/// A traced fiber: closed polyline components plus the worst invariant
/// residuals over all vertices.
#[derive(Clone, Debug)]
pub struct FiberTrace {
    pub components: Vec<Vec<State3>>,
    pub residual_h: f64,
    pub residual_c: f64,
}

impl FiberTrace {
    /// Distance from a point to the traced curve (all components, with the
    /// closing segments included).
    pub fn distance_to(&self, s: State3) -> f64 {
        self.components
            .iter()
            .map(|c| dist_to_closed_polyline(s, c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distance from a point to a closed polyline.
pub fn dist_to_closed_polyline(s: State3, poly: &[State3]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => s.dist(poly[0]),
        n => {
            let mut best = f64::INFINITY;
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                best = best.min(dist_to_segment(s, a, b));
            }
            best
        }
    }
}

fn dist_to_segment(s: State3, a: State3, b: State3) -> f64 {
    let ab = b - a;
    let denom = ab.dot(ab);
    if denom == 0.0 {
        return s.dist(a);
    }
    let t = ((s - a).dot(ab) / denom).clamp(0.0, 1.0);
    s.dist(a + ab * t)
}

/// Trace the two closed fiber components over an interior value pair.
///
/// Seeds come from a 64x64 spherical-angle scan of each `y`-hemisphere of
/// the sphere `|s|^2 = 2c` (sign changes of `H - h` along rings, refined
/// by bisection); each component is then followed by arc-length
/// continuation with tangent `grad H x grad C` and a Newton corrector in
/// the plane spanned by the two gradients.
pub fn trace_fiber(v: ECValue, p: &ModelParams, step: f64) -> Result<FiberTrace> {
    p.require_int()?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParam("trace step must be positive and finite"));
    }
    match classify_value(v, p) {
        Stratum::SigmaPMinus | Stratum::SigmaPPlus => {}
        _ => return Err(Error::WrongStratum),
    }

    let mut components = Vec::with_capacity(2);
    for hemisphere in [1.0, -1.0] {
        let seed = find_seed(v, p, hemisphere)?;
        components.push(trace_component(seed, v, p, step)?);
    }

    let mut residual_h = 0.0_f64;
    let mut residual_c = 0.0_f64;
    for c in &components {
        for &s in c {
            residual_h = residual_h.max((model::hamiltonian(s, p) - v.h).abs());
            residual_c = residual_c.max((model::casimir(s) - v.c).abs());
        }
    }
    Ok(FiberTrace { components, residual_h, residual_c })
}

const SEED_GRID: usize = 64;

/// Scan rings of constant `y` in one hemisphere for a sign change of
/// `H - h` and pin it down by bisection in the ring angle.
fn find_seed(v: ECValue, p: &ModelParams, hemisphere: f64) -> Result<State3> {
    let r = (2.0 * v.c).sqrt();
    let at = |alpha: f64, psi: f64| {
        State3::new(
            r * alpha.sin() * psi.cos(),
            hemisphere * r * alpha.cos(),
            r * alpha.sin() * psi.sin(),
        )
    };
    let g = |s: State3| model::hamiltonian(s, p) - v.h;
    for i in 0..SEED_GRID {
        // Open polar range: the poles and the equator are excluded.
        let alpha = (i as f64 + 0.5) / SEED_GRID as f64 * core::f64::consts::FRAC_PI_2;
        let mut prev_psi = 0.0;
        let mut prev_g = g(at(alpha, prev_psi));
        for j in 1..=SEED_GRID {
            let psi = j as f64 / SEED_GRID as f64 * core::f64::consts::TAU;
            let cur_g = g(at(alpha, psi));
            if prev_g == 0.0 {
                return Ok(at(alpha, prev_psi));
            }
            if (prev_g < 0.0) != (cur_g < 0.0) {
                // Bisection on the ring keeps the point exactly on the sphere.
                let (mut lo, mut hi, mut glo) = (prev_psi, psi, prev_g);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let gm = g(at(alpha, mid));
                    if gm == 0.0 {
                        return Ok(at(alpha, mid));
                    }
                    if (glo < 0.0) == (gm < 0.0) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(at(alpha, 0.5 * (lo + hi)));
            }
            prev_psi = psi;
            prev_g = cur_g;
        }
    }
    Err(Error::SeedNotFound)
}

fn trace_component(seed: State3, v: ECValue, p: &ModelParams, step: f64) -> Result<Vec<State3>> {
    let tol = CORRECTOR_TOL * (1.0 + v.h.abs() + v.c.abs());
    let mut s = correct(seed, v, p, tol).ok_or(Error::SeedNotFound)?;
    let start = s;
    let mut out = Vec::new();
    out.push(s);

    let r = (2.0 * v.c).sqrt();
    let max_steps = (20.0 * core::f64::consts::PI * r / step) as usize + 200;
    for i in 0..max_steps {
        let tangent = model::grad_hamiltonian(s, p)
            .cross(model::grad_casimir(s))
            .normalized()
            .ok_or(Error::ContinuationStalled { t: i as f64 * step })?;
        let predicted = s + tangent * step;
        s = correct(predicted, v, p, tol)
            .ok_or(Error::ContinuationStalled { t: i as f64 * step })?;
        if i >= 5 && s.dist(start) < step {
            return Ok(out);
        }
        out.push(s);
    }
    Err(Error::ContinuationStalled { t: max_steps as f64 * step })
}

/// Newton steps toward `(H, C) = (h, c)` restricted to the plane spanned
/// by the two gradients; `None` if the residual fails to reach `tol`.
fn correct(mut s: State3, v: ECValue, p: &ModelParams, tol: f64) -> Option<State3> {
    for _ in 0..30 {
        let rh = model::hamiltonian(s, p) - v.h;
        let rc = model::casimir(s) - v.c;
        if rh.abs().max(rc.abs()) <= tol {
            return Some(s);
        }
        let gh = model::grad_hamiltonian(s, p);
        let gc = model::grad_casimir(s);
        let (hh, hc, cc) = (gh.dot(gh), gh.dot(gc), gc.dot(gc));
        let det = hh * cc - hc * hc;
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let alpha = (-rh * cc + rc * hc) / det;
        let beta = (-rc * hh + rh * hc) / det;
        s = s + gh * alpha + gc * beta;
        if !s.is_finite() {
            return None;
        }
    }
    None
}

/// Three value pairs witnessing that the image is not convex: two boundary
/// points whose midpoint falls outside. Valid for every integer
/// `lambda >= 2` because the boundary curve `h = sqrt(b(c))` is strictly
/// convex in `c`, so chords lie strictly above it.
pub fn nonconvexity_witness(p: &ModelParams) -> [ECValue; 3] {
    let (c1, c2) = (1.5, 6.0);
    let h1 = boundary_value(c1, p).sqrt();
    let h2 = boundary_value(c2, p).sqrt();
    [
        ECValue::new(h1, c1),
        ECValue::new(h2, c2),
        ECValue::new(0.5 * (h1 + h2), 0.5 * (c1 + c2)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> ModelParams {
        ModelParams::integer(2).unwrap()
    }

    #[test]
    fn ec_hand_values() {
        let p = p2();
        let v = ec(State3::new(1.0, 2.0_f64.sqrt(), 0.0), &p);
        assert!((v.h - 2.0).abs() < 1e-15);
        assert!((v.c - 1.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_hand_values() {
        let p = p2();
        // lambda = 2: b(c) = 4 * (2/3)^3 * c^3.
        assert!((boundary_value(1.5, &p) - 4.0).abs() < 1e-12);
        assert!((boundary_value(3.0, &p) - 32.0).abs() < 1e-12);
        assert!((boundary_value(3.75, &p) - 62.5).abs() < 1e-12);
    }

    #[test]
    fn classification_hand_values() {
        let p = p2();
        assert_eq!(classify_value(ECValue::new(0.0, 0.0), &p), Stratum::SigmaS0);
        assert_eq!(classify_value(ECValue::new(0.0, 2.0), &p), Stratum::SigmaU);
        assert_eq!(classify_value(ECValue::new(2.0, 1.5), &p), Stratum::SigmaSPlusStar);
        assert_eq!(classify_value(ECValue::new(-2.0, 1.5), &p), Stratum::SigmaSMinusStar);
        assert_eq!(classify_value(ECValue::new(1.0, 1.5), &p), Stratum::SigmaPPlus);
        assert_eq!(classify_value(ECValue::new(-1.0, 1.5), &p), Stratum::SigmaPMinus);
        assert_eq!(classify_value(ECValue::new(3.0, 1.5), &p), Stratum::Outside);
        assert_eq!(classify_value(ECValue::new(0.1, 0.0), &p), Stratum::Outside);
        assert_eq!(classify_value(ECValue::new(0.0, -1.0), &p), Stratum::Outside);
        assert_eq!(classify_value(ECValue::new(f64::NAN, 1.0), &p), Stratum::Outside);
    }

    #[test]
    fn topology_table() {
        assert_eq!(fiber_topology(Stratum::Outside), FiberTopology::Empty);
        assert_eq!(fiber_topology(Stratum::SigmaS0), FiberTopology::Point);
        assert_eq!(fiber_topology(Stratum::SigmaU), FiberTopology::HeteroclinicSet);
        assert_eq!(fiber_topology(Stratum::SigmaSPlusStar), FiberTopology::TwoPoints);
        assert_eq!(fiber_topology(Stratum::SigmaSMinusStar), FiberTopology::TwoPoints);
        assert_eq!(fiber_topology(Stratum::SigmaPPlus), FiberTopology::TwoCircles);
        assert_eq!(fiber_topology(Stratum::SigmaPMinus), FiberTopology::TwoCircles);
    }

    #[test]
    fn equilibrium_values_land_on_their_strata() {
        let p = p2();
        let e = Equilibrium::stable_plus(1.0, &p);
        assert_eq!(classify_value(ec(e.point, &p), &p), Stratum::SigmaSPlusStar);
        let e = Equilibrium::stable_minus(1.0, &p);
        assert_eq!(classify_value(ec(e.point, &p), &p), Stratum::SigmaSPlusStar);
        let e = Equilibrium::spin_axis(2.0);
        assert_eq!(classify_value(ec(e.point, &p), &p), Stratum::SigmaU);
        assert_eq!(classify_value(ec(State3::ZERO, &p), &p), Stratum::SigmaS0);
    }

    #[test]
    fn stable_equilibria_parity_even() {
        let p = p2();
        let s2 = 2.0_f64.sqrt();
        let pair = stable_equilibria_for(ECValue::new(2.0, 1.5), &p).unwrap();
        assert_eq!(pair[0].point, State3::new(1.0, -s2, 0.0));
        assert_eq!(pair[1].point, State3::new(1.0, s2, 0.0));
        let pair = stable_equilibria_for(ECValue::new(-2.0, 1.5), &p).unwrap();
        assert_eq!(pair[0].point, State3::new(-1.0, s2, 0.0));
        assert_eq!(pair[1].point, State3::new(-1.0, -s2, 0.0));
    }

    #[test]
    fn stable_equilibria_parity_odd() {
        let p = ModelParams::integer(3).unwrap();
        // lambda = 3, c = 2: M = 1, energies +/- 3^(3/2).
        let h = 3.0_f64.sqrt().powi(3);
        let s3 = 3.0_f64.sqrt();
        let pair = stable_equilibria_for(ECValue::new(h, 2.0), &p).unwrap();
        assert!(pair[0].point.dist(State3::new(1.0, s3, 0.0)) < 1e-12);
        assert!(pair[1].point.dist(State3::new(-1.0, -s3, 0.0)) < 1e-12);
        for e in pair {
            assert!(model::hamiltonian(e.point, &p) > 0.0);
        }
        let pair = stable_equilibria_for(ECValue::new(-h, 2.0), &p).unwrap();
        for e in pair {
            assert!(model::hamiltonian(e.point, &p) < 0.0);
        }
    }

    #[test]
    fn stable_equilibria_rejects_axis_values() {
        let p = p2();
        assert_eq!(
            stable_equilibria_for(ECValue::new(0.0, 1.5), &p).unwrap_err(),
            Error::WrongStratum
        );
        assert_eq!(
            stable_equilibria_for(ECValue::new(5.0, 1.5), &p).unwrap_err(),
            Error::WrongStratum
        );
    }

    #[test]
    fn traced_fiber_closes_with_small_residuals() {
        let p = p2();
        let v = ECValue::new(1.0, 1.5);
        let trace = trace_fiber(v, &p, 1e-3).unwrap();
        assert_eq!(trace.components.len(), 2);
        assert!(trace.residual_h < 1e-9, "H residual {}", trace.residual_h);
        assert!(trace.residual_c < 1e-9, "C residual {}", trace.residual_c);
        for comp in &trace.components {
            assert!(comp.len() > 100);
            let gap = comp.last().unwrap().dist(comp[0]);
            assert!(gap < 2e-3, "component gap {gap}");
        }
        // The two components live in opposite y-hemispheres.
        assert!(trace.components[0].iter().all(|s| s.y > 0.0));
        assert!(trace.components[1].iter().all(|s| s.y < 0.0));
    }

    #[test]
    fn trace_rejects_wrong_strata() {
        let p = p2();
        assert_eq!(trace_fiber(ECValue::new(3.0, 1.5), &p, 1e-3).unwrap_err(), Error::WrongStratum);
        assert_eq!(trace_fiber(ECValue::new(0.0, 1.5), &p, 1e-3).unwrap_err(), Error::WrongStratum);
        assert_eq!(trace_fiber(ECValue::new(2.0, 1.5), &p, 1e-3).unwrap_err(), Error::WrongStratum);
    }

    #[test]
    fn witness_brackets_the_image() {
        for n in [2, 3, 4, 5] {
            let p = ModelParams::integer(n).unwrap();
            let [a, b, mid] = nonconvexity_witness(&p);
            assert_eq!(classify_value(a, &p), Stratum::SigmaSPlusStar);
            assert_eq!(classify_value(b, &p), Stratum::SigmaSPlusStar);
            assert_eq!(classify_value(mid, &p), Stratum::Outside, "lambda = {n}");
            // Mirror witness for h < 0.
            let neg = ECValue::new(-mid.h, mid.c);
            assert_eq!(classify_value(neg, &p), Stratum::Outside);
        }
    }

    #[test]
    fn witness_hand_values() {
        let p = p2();
        let [a, b, mid] = nonconvexity_witness(&p);
        assert!((a.h - 2.0).abs() < 1e-12);
        assert!((b.h - 16.0).abs() < 1e-11);
        // Midpoint (9, 3.75): b(3.75) = 62.5 < 81.
        assert!((mid.h - 9.0).abs() < 1e-11);
        assert!((mid.c - 3.75).abs() < 1e-15);
    }

    #[test]
    fn polyline_distance() {
        let square = [
            State3::new(0.0, 0.0, 0.0),
            State3::new(1.0, 0.0, 0.0),
            State3::new(1.0, 1.0, 0.0),
            State3::new(0.0, 1.0, 0.0),
        ];
        let d = dist_to_closed_polyline(State3::new(0.5, -0.5, 0.0), &square);
        assert!((d - 0.5).abs() < 1e-15);
        // The closing edge (0,1,0)-(0,0,0) counts too.
        let d = dist_to_closed_polyline(State3::new(-0.25, 0.5, 0.0), &square);
        assert!((d - 0.25).abs() < 1e-15);
    }
}
