use core::fmt;

/// Errors produced by the core dynamics, integration and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented constraint.
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
    },
    /// Moments do not describe a physical Gaussian state.
    UnphysicalMoments { determinant: f64 },
    /// `|<q>|` reached the `1 - q^2` singularity.
    Singular { q: f64 },
    /// The integration left the admissible region at time `t`.
    GuardHit { t: f64 },
    /// The step budget was exhausted at time `t`.
    StepLimit { t: f64 },
    /// A statistic needs a longer window than was supplied.
    InsufficientData { needed: f64, got: f64 },
    /// No homoclinic orbit exists for this mass and purity.
    NoHomoclinic { m: f64, purity: f64 },
    /// The power-law fit window contains non-positive values or too few points.
    FitWindow { reason: &'static str },
    /// Too many realizations of an ensemble failed.
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    /// Whether the error stems from numerical failure of an integration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::GuardHit { .. }
                | Error::StepLimit { .. }
                | Error::TooManyFailures { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, constraint } => {
                write!(f, "invalid parameter `{name}`: requires {constraint}")
            }
            Error::UnphysicalMoments { determinant } => write!(
                f,
                "unphysical moments: covariance determinant {determinant} is below 1/4"
            ),
            Error::Singular { q } => write!(f, "singular configuration: |<q>| = {} >= 1", q.abs()),
            Error::GuardHit { t } => write!(f, "guard hit at t = {t}"),
            Error::StepLimit { t } => write!(f, "step limit exceeded at t = {t}"),
            Error::InsufficientData { needed, got } => write!(
                f,
                "insufficient data: window of length {got} shorter than required {needed}"
            ),
            Error::NoHomoclinic { m, purity } => write!(
                f,
                "no homoclinic orbit for m = {m}, P = {purity}: requires 1/(4 m P^2) < 1"
            ),
            Error::FitWindow { reason } => write!(f, "invalid fit window: {reason}"),
            Error::TooManyFailures { failed, total } => {
                write!(f, "{failed} of {total} realizations failed")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
