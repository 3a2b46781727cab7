use std::path::Path;
use std::process::ExitCode;

use thiserror::Error;

/// Failures are split by who has to act: the operator (arguments, ports,
/// unreachable hubs) or the data (unreadable or degenerate input).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Data(_) => ExitCode::from(2),
        }
    }

    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }

    pub fn in_file(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

impl From<telephyt_hub::client::ClientError> for CliError {
    fn from(e: telephyt_hub::client::ClientError) -> Self {
        CliError::Usage(format!("hub: {e}"))
    }
}
