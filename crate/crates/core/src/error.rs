use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Ensemble parameters outside their admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Argument outside the domain where the routine is defined or accurate.
    #[error("argument out of range: {0}")]
    Range(String),
    /// Malformed request (duplicate points, mismatched grids, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A numerical procedure failed to reach its target.
    #[error("numerical failure: {message}")]
    Numeric { message: String, achieved: Option<f64> },
}

impl Error {
    pub(crate) fn numeric(message: impl Into<String>, achieved: Option<f64>) -> Self {
        Error::Numeric {
            message: message.into(),
            achieved,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
