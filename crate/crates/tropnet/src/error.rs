use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-finite value cannot be represented exactly: {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("polyhedron is empty; {0} requires a non-empty polyhedron")]
    EmptyPolyhedron(&'static str),
    #[error("tropical polynomial must have at least one monomial")]
    EmptyPolynomial,
    #[error("exponent {0} is negative; tropical Puiseux exponents must be nonnegative")]
    NegativeExponent(String),
    #[error("tropical power {0} is negative; only nonnegative powers preserve max-compatibility")]
    NegativePower(String),
    #[error("{rows} rows exceed the subset enumeration cap {cap}; raise the cap or use the lower/upper bound estimators")]
    SubsetCapExceeded { rows: usize, cap: usize },
    #[error("operation requires a scalar-output network, got {0} outputs")]
    ScalarOutputRequired(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("internal solver invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
