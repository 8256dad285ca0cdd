use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sho_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: malformed algebra file: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sho_core::Error as E;
        match self {
            CliError::Core(E::Infeasible { .. } | E::ContextTooLarge(_)) => EXIT_INFEASIBLE,
            CliError::Core(
                E::UnsupportedCharacteristic(_)
                | E::UnsupportedRank(_)
                | E::InvalidTruncation(_)
                | E::LengthMismatch { .. },
            ) => EXIT_USAGE,
            CliError::Core(_) => EXIT_VIOLATION,
            CliError::Io { .. } | CliError::Format { .. } | CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
