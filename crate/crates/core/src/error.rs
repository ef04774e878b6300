use thiserror::Error;

/// Errors raised by the scattering toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("geometry validation failed: {0}")]
    Geometry(String),

    #[error("meshing failed: {0}")]
    Meshing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate triangle (area {area:e})")]
    DegenerateTriangle { area: f64 },

    #[error("ill-conditioned system: {context} (condition estimate {estimate:e})")]
    IllConditioned { context: String, estimate: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("empty input: {0}")]
    Empty(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::IllConditioned { .. } | Error::Numerical(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
