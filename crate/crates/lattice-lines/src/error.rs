use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto stable exit codes:
/// parameter/schema/domain errors exit 2, integrity errors exit 1, and an
/// exhausted stabilization cap exits 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// An invariant that should hold by construction was violated. This
    /// always indicates a bug, never a legitimate input.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Stabilization did not finish within the step cap. Reported, never
    /// silently truncated.
    #[error("not stabilized within {cap} elementary steps")]
    NotStabilized { cap: u64 },

    #[error("order error: traces {first} and {second} are not strictly ordered")]
    Order { first: usize, second: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    /// Exit code used by the `ll` binary for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integrity(_) | Error::Order { .. } => 1,
            Error::NotStabilized { .. } => 3,
            _ => 2,
        }
    }
}
