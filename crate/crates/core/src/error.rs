use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration, scene or plan violates one of its invariants.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Symbol, sector or bin index outside its valid range.
    #[error("{what} index {index} out of range 0..{len}")]
    IndexOutOfRange {
        what: &'static str,
        index: i64,
        len: usize,
    },

    /// The IAA covariance could not be factored even after diagonal loading.
    #[error("covariance of sector {sector} is singular at iteration {iteration}")]
    SingularCovariance { sector: usize, iteration: usize },

    /// Imaging outside the alias-free disc or a peak that is not where it should be.
    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Whether this error comes from the numerics rather than from bad input or IO.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularCovariance { .. } | Error::Aliasing(_))
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
