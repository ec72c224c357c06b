use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("argument error: {0}")]
    Args(String),
    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Size(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Size(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<gkp_qpc::Error> for CliError {
    fn from(e: gkp_qpc::Error) -> Self {
        match e {
            gkp_qpc::Error::Size { .. } => CliError::Size(e.to_string()),
            other => CliError::Args(other.to_string()),
        }
    }
}
