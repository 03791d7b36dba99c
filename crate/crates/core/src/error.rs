use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed form was requested for a set that is not decreasing.
    #[error("set is not decreasing: {violations} covering violations (first: {first:?})")]
    NotDecreasing {
        violations: usize,
        first: Option<(usize, usize)>,
    },

    #[error("numeric error at index {index}: {detail}")]
    Numeric { index: usize, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    /// A runtime invariant failed; indicates a bug rather than bad input.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
