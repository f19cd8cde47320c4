use mechforge_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid input: files, flags, labels.
    #[error("{0}")]
    Input(String),
    /// Input is well formed but violates a precondition of the operation.
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Precondition(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::NegativeBasePayoff(_) | CoreError::NonPositiveScale { .. } | CoreError::NonPositiveOptimum(_) => {
                CliError::Precondition(msg)
            }
            CoreError::Infeasible { .. } => CliError::Infeasible(msg),
            _ => CliError::Input(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
