use thiserror::Error;

/// Failure of one CLI run, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable inputs, values that violate an invariant.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed, or a verification check did not pass.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<weighted_savgol::Error> for CliError {
    fn from(e: weighted_savgol::Error) -> Self {
        use weighted_savgol::Error as E;
        match e {
            E::InvalidArgument(_) | E::OverParameterized { .. } | E::InsufficientData { .. } => {
                CliError::Usage(e.to_string())
            }
            E::DesignFailure(_) | E::NonFinite { .. } => CliError::Failure(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn failure(msg: impl Into<String>) -> CliError {
    CliError::Failure(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
