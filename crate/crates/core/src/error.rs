use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be odd and at least 1")]
    InvalidDimension(i64),

    #[error("duplicate points: index {i} and {j} are {distance:e} apart")]
    DuplicatePoints { i: usize, j: usize, distance: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ill-conditioned system (condition estimate {condition:e}) after jitter {jitter:e}")]
    IllConditioned { condition: f64, jitter: f64 },

    #[error("quadrature did not converge: relative change {relative_change:e} at max refinement")]
    Quadrature { relative_change: f64 },

    #[error("grid truncation: edge magnitude {edge:e} exceeds {limit:e}")]
    Truncation { edge: f64, limit: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
