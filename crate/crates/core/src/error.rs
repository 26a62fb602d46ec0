use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation needs a finite, positive rationality level.
    #[error("unsupported rationality level: {0}")]
    UnsupportedLevel(String),

    /// The instance has state-dependent sender utility; use the `sdsu` solvers.
    #[error("instance is not state-independent: {0}")]
    NotStateIndependent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Numeric(_) | Error::Infeasible | Error::Unbounded
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
