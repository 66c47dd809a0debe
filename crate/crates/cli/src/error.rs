use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags or paths.
    #[error("{0}")]
    Input(String),
    /// Synthesis, solver or calibration failure.
    #[error("{0}")]
    Compute(String),
    /// No frequency reaches the gain threshold.
    #[error("{0}")]
    EmptyBand(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 3,
            CliError::EmptyBand(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn compute<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Compute(format!("{context}: {e}"))
}

pub(crate) fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}
