use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the model (negative length,
    /// nonpositive inertia, non-finite input).
    #[error("domain error: {0}")]
    Domain(String),

    /// Inertia entries below the rest configuration, i.e. a negative squared
    /// mass excursion.
    #[error("infeasible inertia: {0}")]
    InfeasibleInertia(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("plot rendering failed: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    ///
    /// 1 for validation and I/O problems, 2 for integration failures.
    /// Oracle failures (3) are not errors and are reported by the caller.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IntegrationFailure { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
