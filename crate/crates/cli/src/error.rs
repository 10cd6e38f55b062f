use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    VerifyFailed(String),

    #[error(transparent)]
    Core(#[from] stochvort::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 config, 3 smallness refused, 4 non-convergence,
    /// 5 verification failure, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::VerifyFailed(_) => 5,
            CliError::Core(e) => match e {
                stochvort::Error::Config { .. } => 2,
                stochvort::Error::SmallnessRefused(_) => 3,
                stochvort::Error::NonConvergence(_) => 4,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }

    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        CliError::Config {
            line,
            message: message.into(),
        }
    }
}
