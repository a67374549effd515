use std::io;
use std::path::PathBuf;

use qm_bootstrap::{PotentialError, ScanError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    ConfigParse(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("rejected: {0}")]
    Validation(String),
    #[error("engine: {0}")]
    Engine(#[from] qm_bootstrap::Error),
}

impl CliError {
    /// Process exit status; clap reserves 2 for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Validation(_) => 5,
            CliError::Engine(_) => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::InvalidConfig(_) | ScanError::Potential(_) => CliError::Validation(e.to_string()),
            other => CliError::Engine(other.into()),
        }
    }
}

pub const EXIT_CODES: &str = "\
Exit status:
  0  success
  2  command-line usage error
  3  config could not be parsed or has out-of-range values (no files written)
  4  file system error
  5  request rejected by the engine (unsupported potential, matrix kind or grid)
  6  numerical failure inside the engine";
