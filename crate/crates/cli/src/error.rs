use std::path::PathBuf;

use entest_core::mi::ParseError;
use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("config {path}, line {line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("dataset {path}: {source}")]
    Dataset { path: PathBuf, source: ParseError },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] entest_core::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use entest_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::Config { .. } | CliError::Dataset { .. } => {
                EXIT_VALIDATION
            }
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) if e.is_overflow() => EXIT_NUMERICAL,
            CliError::Core(E::Numerical(_)) => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
