use num_complex::Complex64;
use thiserror::Error;

/// Errors reported by every fallible operation of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error:e}")]
    Accuracy { estimate: Complex64, error: f64 },
    #[error("pole at z = {0}")]
    Pole(Complex64),
    #[error("zero at z = {0}")]
    Zero(Complex64),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
