use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {position} near `{token}`: {message}")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("invalid antenna configuration: {0}")]
    InvalidConfig(String),

    #[error("index {index} out of range for {kind} (K = {users})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        users: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration {0} is not tightly-feasible")]
    NotTight(String),

    #[error("configuration {0} is not super-feasible")]
    NotSuper(String),

    #[error("configuration {0} is infeasible")]
    Infeasible(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty channel: no present transmitter or receiver")]
    EmptyChannel,

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(position: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            token: token.into(),
            message: message.into(),
        }
    }

    /// True for guard and invariant failures (as opposed to bad input).
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::GuardExceeded(_) | Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
