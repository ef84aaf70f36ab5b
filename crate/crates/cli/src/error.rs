use diverse_match::io::IoError;

/// Failures of a command, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid instance:\n{0}")]
    Validation(String),
    #[error("refused: {0}")]
    Limit(String),
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Failed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Limit(_) => 3,
            CliError::Malformed(_) => 4,
            CliError::Schema(_) => 5,
            CliError::Usage(_) => 64,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::File { .. } => CliError::Io(e.to_string()),
            IoError::Malformed(_) => CliError::Malformed(e.to_string()),
            IoError::Schema(_) | IoError::WrongProblem { .. } => CliError::Schema(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
