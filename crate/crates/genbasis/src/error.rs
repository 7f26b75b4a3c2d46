use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is out of range or malformed.
    #[error("invalid input: {0}")]
    Input(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A text fixture or manifest failed to parse.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// An IDX payload is structurally wrong. `offset` is the byte offset of
    /// the field that failed validation.
    #[error("{path}: bad IDX data at byte {offset}: {msg}")]
    Idx {
        path: PathBuf,
        offset: u64,
        msg: String,
    },

    /// Training failed to reach 100% accuracy on its subset.
    #[error("fit failed after {reinits} re-initializations: final train accuracy {final_accuracy:.5} (budget {max_steps} steps)")]
    FitFailure {
        reinits: usize,
        final_accuracy: f64,
        max_steps: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
