use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("undefined roots: {0} is the zero polynomial")]
    ZeroPolynomial(&'static str),

    #[error("duplicate base point {0} in jet list")]
    DuplicateBasePoint(Complex64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerator and denominator share the root {0}")]
    CommonRoot(Complex64),

    #[error("non-finite value at ({z}, {w})")]
    NonFinite { z: Complex64, w: Complex64 },

    #[error("quadrature subdivision limit exceeded (error estimate {estimate:e})")]
    QuadratureLimit { estimate: f64 },

    #[error("omitted value: {0}")]
    OmittedValue(String),

    #[error("inconsistent descriptor: {0}")]
    InconsistentDescriptor(String),

    #[error("point {0} lies outside the smoothing strip")]
    OutsideStrip(Complex64),

    #[error("surrogate budget {budget:e} not reached (best error {best:e} at degree {degree})")]
    SurrogateBudget { budget: f64, best: f64, degree: usize },

    #[error("basin limit not converged (residual {residual:e} after {iterations} iterations)")]
    NotConverged { residual: f64, iterations: usize },

    #[error("{stage}: certification failed: {detail}")]
    Certification { stage: String, detail: String },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
