use std::path::Path;

use thiserror::Error;

/// Failures of a subcommand, each tied to one documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("integration diverged at t = {t}")]
    Divergence { t: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn parse(path: &Path, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.display().to_string(), message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Divergence { .. } | CliError::Numerical(_) => 3,
            CliError::Invalid(_) => 4,
        }
    }
}

impl From<nhforce_core::Error> for CliError {
    fn from(e: nhforce_core::Error) -> Self {
        use nhforce_core::Error as E;
        match e {
            E::Divergence { t } => CliError::Divergence { t },
            E::NumericalFailure { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
