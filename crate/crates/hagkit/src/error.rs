use hagedorn_core::Error as CoreError;

/// A command failure, classified by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn io(context: &str, e: impl std::fmt::Display) -> Self {
        Failure::Io(format!("{context}: {e}"))
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonFinite(_)
            | CoreError::Singular(_)
            | CoreError::NotPositiveDefinite(_)
            | CoreError::NoConvergence(_)
            | CoreError::DriftExceeded { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;
