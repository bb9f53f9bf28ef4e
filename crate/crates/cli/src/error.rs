use confluent_susy::SusyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("singular Wronskian: {what}; zero brackets {brackets:?}")]
    Singular {
        what: String,
        brackets: Vec<(f64, f64)>,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("output: {0}")]
    Output(String),

    #[error(transparent)]
    Numeric(SusyError),
}

impl CliError {
    /// 0 ok, 1 config, 2 singularity, 3 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Output(_) => 1,
            Self::Singular { .. } => 2,
            Self::Verification(_) | Self::Numeric(_) => 3,
        }
    }
}

impl From<SusyError> for CliError {
    fn from(e: SusyError) -> Self {
        match e {
            SusyError::Singularity { what, brackets } => Self::Singular { what, brackets },
            SusyError::InvalidGrid(m) | SusyError::InvalidInput(m) | SusyError::Table(m) => {
                Self::Config(m)
            }
            SusyError::Domain { .. } | SusyError::Unsupported(_) => Self::Config(e.to_string()),
            SusyError::Io(e) => Self::Output(e.to_string()),
            other => Self::Numeric(other),
        }
    }
}
