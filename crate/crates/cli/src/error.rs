use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file contents or parameter values. Exit code 2.
    #[error("invalid {field}: {reason}")]
    Config { field: String, reason: String },

    /// The computation itself failed. Exit code 3.
    #[error("{0}")]
    Runtime(String),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 3,
        }
    }
}

impl From<sir_exact::SirError> for CliError {
    fn from(e: sir_exact::SirError) -> Self {
        match e {
            sir_exact::SirError::InvalidInput { field, reason } => CliError::config(field, reason),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
