use thiserror::Error;

/// Process-level failure classes; the variant fixes the exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag combination or value (exit 1).
    #[error("{0}")]
    Usage(String),
    /// Unreadable input, invalid text, corrupt or incompatible index file,
    /// or a query the index cannot serve (exit 2).
    #[error("{0}")]
    Data(String),
    /// Verification found answers that disagree with brute force (exit 3).
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<cooc::Error> for CliError {
    fn from(e: cooc::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<crate::format::FormatError> for CliError {
    fn from(e: crate::format::FormatError) -> Self {
        CliError::Data(e.to_string())
    }
}
