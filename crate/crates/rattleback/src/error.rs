//! Crate-wide error type.

use core::fmt;

/// Everything that can go wrong across the crate, in one enum.
///
/// Variants carry just enough data to diagnose the failure; the CLI maps
/// them onto exit codes (parameter problems are validation errors, the
/// rest are numerical failures).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Error {
    /// An operation that needs an integer shape parameter `lambda >= 2`
    /// was called with a non-integer (or too small) value.
    NonIntegerLambda { lambda: f64 },
    /// `lambda` must be strictly positive.
    NonPositiveLambda { lambda: f64 },
    /// The bivector rescaling `y^(1-lambda)` is singular on y = 0.
    SingularPlane,
    /// Deformation parameters must satisfy `a*d - b*c = 1`.
    NotUnimodular { det: f64 },
    /// Adaptive step size fell below the hard floor.
    StepUnderflow { t: f64 },
    /// A state or derivative stopped being finite.
    NonFinite { t: f64 },
    /// Fewer than two section crossings were found in the time window.
    NoCrossings,
    /// The requested value pair is not in the stratum the operation needs.
    WrongStratum,
    /// Grid scan over the sphere found no point of the requested level set.
    SeedNotFound,
    /// Predictor-corrector continuation stopped making progress.
    ContinuationStalled { t: f64 },
    /// A closed-form orbit evaluation left the finite range.
    Overflow,
    /// A closed-form orbit did not reach its asymptotic endpoints.
    LimitDrift { distance: f64 },
    /// The initial state violates the precondition of a convergence run.
    BasinViolation,
    /// Catch-all for invalid scalar arguments (step sizes, amplitudes, ...).
    InvalidParam(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::NonIntegerLambda { lambda } => {
                write!(f, "operation requires integer lambda >= 2, got {lambda}")
            }
            Error::NonPositiveLambda { lambda } => {
                write!(f, "lambda must be positive, got {lambda}")
            }
            Error::SingularPlane => write!(f, "rescaling is singular on the plane y = 0"),
            Error::NotUnimodular { det } => {
                write!(f, "realization parameters must satisfy a*d - b*c = 1, got det {det}")
            }
            Error::StepUnderflow { t } => write!(f, "adaptive step underflow at t = {t}"),
            Error::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
            Error::NoCrossings => write!(f, "fewer than two section crossings in window"),
            Error::WrongStratum => write!(f, "value pair lies in the wrong stratum"),
            Error::SeedNotFound => write!(f, "no seed point found on the level set"),
            Error::ContinuationStalled { t } => {
                write!(f, "fiber continuation stalled after arc length {t}")
            }
            Error::Overflow => write!(f, "closed-form evaluation overflowed"),
            Error::LimitDrift { distance } => {
                write!(f, "asymptotic endpoint missed by {distance}")
            }
            Error::BasinViolation => write!(f, "initial state outside the admissible basin"),
            Error::InvalidParam(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
