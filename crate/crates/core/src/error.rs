use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants split into two groups that callers (the CLI in particular)
/// treat differently: input/parameter problems and compute-domain problems.
/// See [`Error::is_domain`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid knot: {0}")]
    InvalidKnot(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("geometric degeneracy: {0}")]
    Degenerate(String),

    #[error("regularity error: {0}")]
    Regularity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors raised by a computation on otherwise well-formed input
    /// (domain, degeneracy and regularity failures).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Degenerate(_) | Error::Regularity(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
