use thiserror::Error;

/// Errors raised by lattice construction, generator assembly and the checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice needs an even number of points >= 4, got {0}")]
    BadPointCount(usize),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is outside the allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },
    #[error("kick q = {q} is not an integer multiple of dp = {dp}")]
    OffLatticeKick { q: f64, dp: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lattice mismatch between operands")]
    LatticeMismatch,
    #[error("negative entry {value} in {table}")]
    NegativeEntry { table: &'static str, value: f64 },
    #[error("{0}")]
    Singular(String),
    #[error("size guard exceeded: N = {n} > {limit}; {advice}")]
    SizeGuard {
        n: usize,
        limit: usize,
        advice: &'static str,
    },
    #[error("not a completely positive semigroup generator: {0}")]
    NotCompletelyPositive(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("no usable matrix elements: {0}")]
    NoSamples(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::NonPositive { name, value })
    }
}
