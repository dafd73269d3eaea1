use thiserror::Error;

/// Errors surfaced by the library. Every variant names the offending input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid character table: {0}")]
    InvalidCharacter(String),
    #[error("character of modulus {modulus} is not primitive")]
    NonPrimitive { modulus: u64 },
    #[error("S_{weight} is trivial")]
    EmptySpace { weight: u32 },
    #[error("weight {weight} is not supported: {reason}")]
    UnsupportedWeight { weight: u32, reason: String },
    #[error("insufficient precision: {what} needs {required}, have {available}")]
    Precision {
        what: String,
        required: usize,
        available: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("gcd(r, D) = {gcd} for r = {r}, D = {modulus}")]
    NotCoprime { r: u64, modulus: u64, gcd: u64 },
    #[error("family rejected: {0}")]
    Rejected(String),
    #[error("empty family at weight {weight}")]
    EmptyFamily { weight: u32 },
    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),
    #[error("support condition violated: {0}")]
    Support(String),
    #[error("calibration drift {drift:e} at weight {weight}")]
    CalibrationDrift { weight: u32, drift: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
