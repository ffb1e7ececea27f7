use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CarpError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("size cap exceeded: {what} = {got} > {cap}")]
    SizeCap {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CarpError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        CarpError::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        CarpError::Precondition(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CarpError::Parse { .. } | CarpError::Io { .. } | CarpError::Input(_) => 2,
            CarpError::Infeasible(_) => 3,
            CarpError::SizeCap { .. } => 4,
            CarpError::Precondition(_) => 1,
        }
    }
}

pub type Result<T, E = CarpError> = std::result::Result<T, E>;
