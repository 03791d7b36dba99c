//! CLI errors and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, parameters, or configuration.
    #[error("usage: {0}")]
    Usage(String),
    /// Unreadable or malformed input data.
    #[error("data: {0}")]
    Data(String),
    /// A check that must hold did not.
    #[error("invariant: {0}")]
    Invariant(String),
    #[error(transparent)]
    Core(#[from] polarforge::Error),
    #[error("i/o on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use polarforge::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Invariant(_) => 4,
            CliError::Core(e) => match e {
                E::Domain(_)
                | E::Unsupported(_)
                | E::Infeasible(_)
                | E::Mismatch(_)
                | E::Budget(_)
                | E::Length { .. } => 2,
                E::NotDecreasing { .. } => 3,
                E::Numeric { .. } | E::Invariant(_) => 4,
            },
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
