use std::path::PathBuf;

use nws_core::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Lab(#[from] LabError),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Some checked claim or bound did not hold; the reports were still written.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 1  | a claim or bound failed |
    /// | 2  | invalid parameter, domain error, divergent integral, CFL violation |
    /// | 3  | quadrature non-convergence |
    /// | 4  | solver blow-up |
    /// | 64 | malformed command line or config file |
    /// | 74 | file system error |
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Lab(LabError::NonConvergence { .. }) => 3,
            CliError::Lab(LabError::BlowUp { .. }) => 4,
            CliError::Lab(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Io { .. } => 74,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
