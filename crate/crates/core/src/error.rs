use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("point {0} lies numerically in the F-spectrum (cond(R) = {1:.3e})")]
    SpectrumHit(String, f64),
    #[error("function carries no decay certificate for the requested class: {0}")]
    NoDecayMetadata(String),
    #[error("function is not in the class required by the calculus: {0}")]
    ClassMismatch(String),
    #[error("function carries no growth certificate")]
    MissingGrowth,
    #[error("right-kernel form requires an intrinsic function")]
    NotIntrinsic,
    #[error("operator or its conjugate is not injective (smallest singular value {0:.3e})")]
    NotInjective(f64),
    #[error("quadrature stopped at {panels} panels with error estimate {estimate:.3e} (target {target:.3e})")]
    ToleranceNotMet { panels: usize, estimate: f64, target: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
