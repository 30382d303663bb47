use alloc::boxed::Box;
use alloc::string::String;

use crate::index::MultiIndex;
use crate::params::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameters fail validation: {0}")]
    InvalidParameters(Box<ValidationReport>),
    #[error("matrix is singular: {0}")]
    Singular(&'static str),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),
    #[error("index set is not downward closed")]
    NotDownwardClosed,
    #[error("multi-index {0} is not in the index set")]
    NotInSet(MultiIndex),
    #[error("{what} exceeds cap: requested {requested}, cap {cap}")]
    ExceedsCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("symplectic drift {residual:.3e} exceeds threshold at t = {t}")]
    DriftExceeded { t: f64, residual: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
