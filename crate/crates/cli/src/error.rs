use thiserror::Error;

use complex_germ::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    /// Wrap a core error raised while validating a named config field.
    pub fn field(path: &str, e: CoreError) -> Self {
        CliError::Config(format!("{path}: {e}"))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_numerical() {
            return CliError::Numerical(e.to_string());
        }
        match e {
            CoreError::InvalidArgument(_)
            | CoreError::Parse { .. }
            | CoreError::Coverage(_)
            | CoreError::NotPositiveDefinite { .. }
            | CoreError::NotLagrangian { .. }
            | CoreError::SizeCap(_)
            | CoreError::Dimension { .. } => CliError::Config(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
