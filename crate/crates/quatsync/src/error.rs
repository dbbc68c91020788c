use quatsync_core::Error;
use thiserror::Error;

/// Process exit status for each failure class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 1,
    BlowUp = 2,
    Analysis = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// The run left the blow-up guard; partial output has been written.
    #[error("blow-up: {0}")]
    BlowUp(Error),
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn missing(field: &str, needed_by: &str) -> Self {
        CliError::Config(format!("missing field `{field}` (required for {needed_by})"))
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io { .. } => ExitCode::Config,
            CliError::BlowUp(_) => ExitCode::BlowUp,
            CliError::Analysis(_) => ExitCode::Analysis,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. } => CliError::BlowUp(e),
            Error::NotWeak { .. } | Error::InvalidArgument(_) => CliError::Config(e.to_string()),
            other => CliError::Analysis(other.to_string()),
        }
    }
}
