//! Batch front end: configuration files in, CSV tables out.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unit mismatch: {message}")]
    Units { line: usize, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Physics(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Units { .. } | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Units { .. } => "units",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Physics(_) => "physics",
            CliError::Numeric(_) => "numeric",
        }
    }

    /// One line for scripts: `error code=<n> kind=<kind> line=<n> message="<text>"`.
    pub fn machine_line(&self) -> String {
        let line = match self {
            CliError::Parse { line, .. } | CliError::Units { line, .. } => *line,
            _ => 0,
        };
        let message = match self {
            CliError::Parse { message, .. } | CliError::Units { message, .. } => message.clone(),
            other => other.to_string(),
        };
        format!("error code={} kind={} line={line} message={:?}", self.exit_code(), self.kind(), message)
    }
}

impl From<layerchain::Error> for CliError {
    fn from(e: layerchain::Error) -> Self {
        use layerchain::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::MalformedSpec(_)
            | E::IndexOutOfRange { .. }
            | E::NotDoublyOccupied(_)
            | E::Unsupported(_)
            | E::CapTooLow { .. }
            | E::SizeCapExceeded { .. } => CliError::Config(e.to_string()),
            E::DecouplingViolated { .. } | E::UnstableForm { .. } => CliError::Physics(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
