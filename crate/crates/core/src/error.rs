use thiserror::Error;

/// Errors raised by the experiment library.
///
/// The variants map onto the CLI exit codes: input errors are configuration
/// problems, resource and precision errors are hard stops.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("conditioning on null atom: {0}")]
    NullAtom(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for errors that stem from bad parameters rather than exhausted
    /// budgets.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Refused(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
