//! The vector field, its two conserved quantities, the bivector
//! realization, the unimodular deformation family, and equilibrium
//! classification.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::State3;

/// Row-major 3x3 matrix.
pub type Mat3 = [[f64; 3]; 3];

/// Determinant tolerance for the unimodular family.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Shape parameter of the model.
///
/// The vector field itself is defined for any `lambda > 0`; everything
/// that evaluates powers `y^lambda` (energy, gradients, bivectors,
/// deformations) additionally needs `lambda` to be an integer `>= 2` so
/// the expressions stay polynomial on all of R^3. Integer values are
/// detected at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    lambda_int: Option<u32>,
}

impl ModelParams {
    /// Any positive shape parameter. Integral values `>= 2` unlock the
    /// energy-dependent operations automatically.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda { lambda });
        }
        let lambda_int = if lambda.fract() == 0.0 && lambda >= 2.0 && lambda <= 64.0 {
            Some(lambda as u32)
        } else {
            None
        };
        Ok(ModelParams { lambda, lambda_int })
    }

    /// Integer shape parameter `n >= 2`.
    pub fn integer(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::NonIntegerLambda { lambda: n as f64 });
        }
        Ok(ModelParams { lambda: n as f64, lambda_int: Some(n) })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn int_lambda(&self) -> Option<u32> {
        self.lambda_int
    }

    /// The integer exponent, or an error for the operations that need one.
    pub fn require_int(&self) -> Result<u32> {
        self.lambda_int.ok_or(Error::NonIntegerLambda { lambda: self.lambda })
    }

    /// `y^lambda` for integer `lambda` (panics otherwise; gated callers
    /// check `require_int` first).
    pub(crate) fn pow_lambda(&self, y: f64) -> f64 {
        let n = self.lambda_int.expect("integer lambda required");
        y.powi(n as i32)
    }

    /// `y^(lambda - 1)`, same contract as [`ModelParams::pow_lambda`].
    pub(crate) fn pow_lambda_m1(&self, y: f64) -> f64 {
        let n = self.lambda_int.expect("integer lambda required");
        y.powi(n as i32 - 1)
    }
}

/// Parameters `(a, b, c, d)` of the deformation family; admissible when
/// `a*d - b*c = 1` (within [`UNIMODULAR_TOL`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizationParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealizationParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let r = RealizationParams { a, b, c, d };
        let det = r.det();
        if !det.is_finite() || (det - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular { det });
        }
        Ok(r)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// The canonical member `(1, 0, 0, 1)`: no deformation.
    pub fn identity() -> Self {
        RealizationParams { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }
}

/// The vector field `(lambda*x*z, -y*z, y^2 - lambda*x^2)`.
#[inline]
pub fn rhs(s: State3, p: &ModelParams) -> State3 {
    let l = p.lambda;
    State3::new(l * s.x * s.z, -s.y * s.z, s.y * s.y - l * s.x * s.x)
}

/// Jacobian of [`rhs`].
pub fn jacobian(s: State3, p: &ModelParams) -> Mat3 {
    let l = p.lambda;
    [
        [l * s.z, 0.0, l * s.x],
        [0.0, -s.z, -s.y],
        [-2.0 * l * s.x, 2.0 * s.y, 0.0],
    ]
}

/// Conserved energy `H = x * y^lambda` (integer `lambda`).
#[inline]
pub fn hamiltonian(s: State3, p: &ModelParams) -> f64 {
    s.x * p.pow_lambda(s.y)
}

/// Conserved Casimir `C = (x^2 + y^2 + z^2) / 2`.
#[inline]
pub fn casimir(s: State3) -> f64 {
    0.5 * (s.x * s.x + s.y * s.y + s.z * s.z)
}

/// `grad H = (y^lambda, lambda*x*y^(lambda-1), 0)`.
#[inline]
pub fn grad_hamiltonian(s: State3, p: &ModelParams) -> State3 {
    State3::new(p.pow_lambda(s.y), p.lambda * s.x * p.pow_lambda_m1(s.y), 0.0)
}

/// `grad C = (x, y, z)`.
#[inline]
pub fn grad_casimir(s: State3) -> State3 {
    s
}

/// The Casimir bivector: `Pi(s) v = grad C(s) x v` as the antisymmetric
/// matrix `[[0, z, -y], [-z, 0, x], [y, -x, 0]]`.
pub fn poisson_matrix(s: State3) -> Mat3 {
    [
        [0.0, s.z, -s.y],
        [-s.z, 0.0, s.x],
        [s.y, -s.x, 0.0],
    ]
}

/// Conformal rescaling `nu = y^(1 - lambda)`; singular on `y = 0`.
pub fn rescale_nu(s: State3, p: &ModelParams) -> Result<f64> {
    let n = p.require_int()?;
    if s.y == 0.0 {
        return Err(Error::SingularPlane);
    }
    Ok(s.y.powi(1 - n as i32))
}

/// The field reassembled from its realization, `nu * Pi * grad H`.
///
/// Away from `y = 0` this reproduces [`rhs`] exactly (up to rounding).
pub fn hamiltonian_field(s: State3, p: &ModelParams) -> Result<State3> {
    let nu = rescale_nu(s, p)?;
    let gh = grad_hamiltonian(s, p);
    Ok(mat_vec(&poisson_matrix(s), gh).scale(nu))
}

/// Deformed bivector `Pi_{a,b}` of the unimodular family.
pub fn family_matrix(s: State3, p: &ModelParams, r: &RealizationParams) -> Result<Mat3> {
    p.require_int()?;
    let yl = p.pow_lambda(s.y);
    let ylm1 = p.pow_lambda_m1(s.y);
    let p12 = r.a * s.z;
    let p13 = -r.a * s.y - p.lambda * r.b * s.x * ylm1;
    let p23 = r.a * s.x + r.b * yl;
    Ok([
        [0.0, p12, p13],
        [-p12, 0.0, p23],
        [-p13, -p23, 0.0],
    ])
}

/// Deformed energy `H_{c,d} = (c/2)(x^2+y^2+z^2) + d * x * y^lambda`.
pub fn family_hamiltonian(s: State3, p: &ModelParams, r: &RealizationParams) -> Result<f64> {
    p.require_int()?;
    Ok(r.c * casimir(s) + r.d * hamiltonian(s, p))
}

fn family_grad_hamiltonian(s: State3, p: &ModelParams, r: &RealizationParams) -> State3 {
    grad_casimir(s).scale(r.c) + grad_hamiltonian(s, p).scale(r.d)
}

/// The field reassembled from a deformed pair, `nu * Pi_{a,b} * grad H_{c,d}`.
///
/// For every admissible `(a, b, c, d)` this again reproduces [`rhs`].
pub fn family_field(s: State3, p: &ModelParams, r: &RealizationParams) -> Result<State3> {
    let det = r.det();
    if !det.is_finite() || (det - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular { det });
    }
    let nu = rescale_nu(s, p)?;
    let m = family_matrix(s, p, r)?;
    Ok(mat_vec(&m, family_grad_hamiltonian(s, p, r)).scale(nu))
}

pub(crate) fn mat_vec(m: &Mat3, v: State3) -> State3 {
    let a = v.as_array();
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2];
    }
    State3::from_array(out)
}

/// Which member of the equilibrium families a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// `(M, M*sqrt(lambda), 0)`, `M != 0`.
    StablePlus,
    /// `(M, -M*sqrt(lambda), 0)`, `M != 0`.
    StableMinus,
    /// `(0, 0, M)`, `M != 0`.
    SpinAxis,
    /// The origin, where all families meet.
    Origin,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    /// Family parameter (0 for the origin).
    pub m: f64,
    pub point: State3,
}

impl Equilibrium {
    pub fn stable_plus(m: f64, p: &ModelParams) -> Self {
        let point = State3::new(m, m * p.lambda.sqrt(), 0.0);
        Equilibrium { kind: EquilibriumKind::StablePlus, m, point }
    }

    pub fn stable_minus(m: f64, p: &ModelParams) -> Self {
        let point = State3::new(m, -m * p.lambda.sqrt(), 0.0);
        Equilibrium { kind: EquilibriumKind::StableMinus, m, point }
    }

    pub fn spin_axis(m: f64) -> Self {
        Equilibrium { kind: EquilibriumKind::SpinAxis, m, point: State3::new(0.0, 0.0, m) }
    }

    pub fn origin() -> Self {
        Equilibrium { kind: EquilibriumKind::Origin, m: 0.0, point: State3::ZERO }
    }
}

/// All equilibria for each `M` in the list; the three families collapse to
/// a single origin entry at `M = 0`.
pub fn equilibria(m_list: &[f64], p: &ModelParams) -> alloc::vec::Vec<Equilibrium> {
    let mut out = alloc::vec::Vec::with_capacity(3 * m_list.len());
    for &m in m_list {
        if m == 0.0 {
            out.push(Equilibrium::origin());
        } else {
            out.push(Equilibrium::stable_minus(m, p));
            out.push(Equilibrium::stable_plus(m, p));
            out.push(Equilibrium::spin_axis(m));
        }
    }
    out
}

/// Real/imaginary parts of a spectrum entry.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Eigenvalue { re, im: 0.0 }
    }

    pub fn imaginary(im: f64) -> Self {
        Eigenvalue { re: 0.0, im }
    }

    pub fn abs(self) -> f64 {
        (self.re * self.re + self.im * self.im).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    LyapunovStable,
    Unstable,
}

/// Data of the energy-Casimir stability test at a stable-family point:
/// the multiplier `mu`, a basis of the constraint kernel, and the Hessian
/// of `C - mu * H` restricted to that kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArnoldReport {
    pub mu: f64,
    pub kernel_basis: [State3; 2],
    pub restricted_hessian: [[f64; 2]; 2],
    pub positive_definite: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub spectrum: [Eigenvalue; 3],
    pub arnold: Option<ArnoldReport>,
}

/// Stability of one equilibrium.
///
/// The stable families are judged by the definiteness of the restricted
/// Hessian (the linear spectrum there is neutral, `{0, +/- i omega}`, and
/// proves nothing); the spin axis is judged by its real spectrum
/// `{0, -M, lambda*M}`; the origin is stable because the Casimir is a
/// strict minimum there.
pub fn classify_equilibrium(e: &Equilibrium, p: &ModelParams) -> Result<StabilityReport> {
    let l = p.lambda;
    match e.kind {
        _ if e.m == 0.0 => Ok(origin_report()),
        EquilibriumKind::Origin => Ok(origin_report()),
        EquilibriumKind::SpinAxis => {
            // Jacobian at (0,0,M) is diag(lambda*M, -M, 0).
            let spectrum = [
                Eigenvalue::real(0.0),
                Eigenvalue::real(-e.m),
                Eigenvalue::real(l * e.m),
            ];
            Ok(StabilityReport { verdict: Verdict::Unstable, spectrum, arnold: None })
        }
        EquilibriumKind::StablePlus | EquilibriumKind::StableMinus => {
            let n = p.require_int()?;
            let sign = if e.kind == EquilibriumKind::StablePlus { 1.0 } else { -1.0 };
            let sign_pow = if n % 2 == 0 { 1.0 } else { sign };
            let mu = sign_pow / (e.m.powi(n as i32 - 1) * l.sqrt().powi(n as i32));
            let w1 = State3::new(-sign * l.sqrt(), 1.0, 0.0);
            let w2 = State3::new(0.0, 0.0, 1.0);

            // Hessian of F = C - mu*H at the point; C contributes the identity.
            let s = e.point;
            let h_xy = l * p.pow_lambda_m1(s.y);
            let h_yy = l * (l - 1.0) * s.x * s.y.powi(n as i32 - 2);
            let a: Mat3 = [
                [1.0, -mu * h_xy, 0.0],
                [-mu * h_xy, 1.0 - mu * h_yy, 0.0],
                [0.0, 0.0, 1.0],
            ];
            let q = |u: State3, v: State3| u.dot(mat_vec(&a, v));
            let restricted = [[q(w1, w1), q(w1, w2)], [q(w2, w1), q(w2, w2)]];
            let det = restricted[0][0] * restricted[1][1] - restricted[0][1] * restricted[1][0];
            let positive_definite = restricted[0][0] > 1e-12 && det > 1e-12;

            let omega = e.m.abs() * (2.0 * l * (l + 1.0)).sqrt();
            let spectrum = [
                Eigenvalue::real(0.0),
                Eigenvalue::imaginary(omega),
                Eigenvalue::imaginary(-omega),
            ];
            let verdict = if positive_definite { Verdict::LyapunovStable } else { Verdict::Unstable };
            Ok(StabilityReport {
                verdict,
                spectrum,
                arnold: Some(ArnoldReport {
                    mu,
                    kernel_basis: [w1, w2],
                    restricted_hessian: restricted,
                    positive_definite,
                }),
            })
        }
    }
}

fn origin_report() -> StabilityReport {
    StabilityReport {
        verdict: Verdict::LyapunovStable,
        spectrum: [Eigenvalue::default(); 3],
        arnold: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> ModelParams {
        ModelParams::integer(2).unwrap()
    }

    #[test]
    fn rhs_hand_values() {
        // (1,1,0): (0, 0, 1 - 2) = (0, 0, -1).
        assert_eq!(rhs(State3::new(1.0, 1.0, 0.0), &p2()), State3::new(0.0, 0.0, -1.0));
        assert_eq!(rhs(State3::new(0.0, 1.0, 1.0), &p2()), State3::new(0.0, -1.0, 1.0));
    }

    #[test]
    fn invariant_hand_values() {
        let s = State3::new(1.0, 2.0, 3.0);
        assert_eq!(hamiltonian(s, &p2()), 4.0);
        assert_eq!(casimir(s), 7.0);
        assert_eq!(grad_hamiltonian(s, &p2()), State3::new(4.0, 4.0, 0.0));
        assert_eq!(grad_casimir(s), s);
    }

    #[test]
    fn bivector_hand_values() {
        let s = State3::new(1.0, 2.0, 3.0);
        let m = poisson_matrix(s);
        assert_eq!(m[0], [0.0, 3.0, -2.0]);
        assert_eq!(m[1], [-3.0, 0.0, 1.0]);
        assert_eq!(m[2], [2.0, -1.0, 0.0]);
        assert_eq!(rescale_nu(s, &p2()).unwrap(), 0.5);
    }

    #[test]
    fn rescaling_singular_on_y_zero() {
        let err = rescale_nu(State3::new(1.0, 0.0, 1.0), &p2()).unwrap_err();
        assert_eq!(err, Error::SingularPlane);
        assert!(hamiltonian_field(State3::new(1.0, 0.0, 1.0), &p2()).is_err());
    }

    #[test]
    fn realization_reproduces_field() {
        let s = State3::new(1.0, 2.0, 3.0);
        let f = hamiltonian_field(s, &p2()).unwrap();
        assert_eq!(f, State3::new(6.0, -6.0, 2.0));
        assert_eq!(f, rhs(s, &p2()));
    }

    #[test]
    fn family_reproduces_field() {
        // (a,b,c,d) = (2,1,1,1), det = 1.
        let r = RealizationParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let s = State3::new(1.0, 2.0, 3.0);
        let f = family_field(s, &p2(), &r).unwrap();
        assert_eq!(f, State3::new(6.0, -6.0, 2.0));
    }

    #[test]
    fn family_rejects_non_unimodular() {
        let err = RealizationParams::new(1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert_eq!(err, Error::NotUnimodular { det: 0.0 });
    }

    #[test]
    fn non_integer_lambda_is_gated() {
        let p = ModelParams::new(1.5).unwrap();
        assert!(p.int_lambda().is_none());
        assert!(rescale_nu(State3::new(1.0, 2.0, 3.0), &p).is_err());
        // The field itself is fine for real lambda.
        let f = rhs(State3::new(1.0, 1.0, 1.0), &p);
        assert_eq!(f, State3::new(1.5, -1.0, -0.5));
    }

    #[test]
    fn equilibria_families_and_dedup() {
        let p = p2();
        let list = equilibria(&[0.0, 1.0], &p);
        assert_eq!(list.len(), 4);
        assert_eq!(list[0].kind, EquilibriumKind::Origin);
        let sqrt2 = 2.0_f64.sqrt();
        assert_eq!(list[1].point, State3::new(1.0, -sqrt2, 0.0));
        assert_eq!(list[2].point, State3::new(1.0, sqrt2, 0.0));
        assert_eq!(list[3].point, State3::new(0.0, 0.0, 1.0));
        for e in &list {
            let f = rhs(e.point, &p);
            assert!(f.norm() < 1e-15, "equilibrium must be a zero of the field");
        }
    }

    #[test]
    fn spin_axis_spectrum() {
        let p = p2();
        let rep = classify_equilibrium(&Equilibrium::spin_axis(1.0), &p).unwrap();
        assert_eq!(rep.verdict, Verdict::Unstable);
        let re: alloc::vec::Vec<f64> = rep.spectrum.iter().map(|e| e.re).collect();
        assert_eq!(re, [0.0, -1.0, 2.0]);
        assert!(rep.arnold.is_none());
    }

    #[test]
    fn stable_plus_arnold_data() {
        let p = p2();
        let e = Equilibrium::stable_plus(1.0, &p);
        let rep = classify_equilibrium(&e, &p).unwrap();
        assert_eq!(rep.verdict, Verdict::LyapunovStable);
        let arnold = rep.arnold.unwrap();
        assert!((arnold.mu - 0.5).abs() < 1e-15);
        let h = arnold.restricted_hessian;
        // diag(2*(lambda+1), 1) = diag(6, 1) at lambda = 2.
        assert!((h[0][0] - 6.0).abs() < 1e-12);
        assert!(h[0][1].abs() < 1e-12 && h[1][0].abs() < 1e-12);
        assert!((h[1][1] - 1.0).abs() < 1e-12);
        assert!(arnold.positive_definite);
        // Neutral spectrum {0, +/- i*sqrt(12)}.
        assert_eq!(rep.spectrum[0], Eigenvalue::real(0.0));
        assert!((rep.spectrum[1].im - 12.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stable_minus_multiplier_sign() {
        // mu_- carries (-1)^lambda: positive for even lambda, negative for odd.
        let p = p2();
        let rep = classify_equilibrium(&Equilibrium::stable_minus(1.0, &p), &p).unwrap();
        assert!((rep.arnold.unwrap().mu - 0.5).abs() < 1e-15);

        let p3 = ModelParams::integer(3).unwrap();
        let rep3 = classify_equilibrium(&Equilibrium::stable_minus(1.0, &p3), &p3).unwrap();
        let mu3 = rep3.arnold.unwrap().mu;
        assert!((mu3 + 1.0 / 3.0_f64.sqrt().powi(3)).abs() < 1e-15);
        assert!(rep3.arnold.unwrap().positive_definite);
    }
}
