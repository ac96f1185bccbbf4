use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    #[error("embedding error: {0}")]
    Embedding(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{space} state space {size} exceeds the cap {cap} (raise it with {flag})")]
    CapExceeded {
        space: &'static str,
        size: String,
        cap: usize,
        flag: &'static str,
    },

    #[error("matrix is not reversible w.r.t. its weights (detailed-balance residual {residual:e})")]
    NonReversible { residual: f64 },

    #[error("operator is not self-adjoint in L2(weights) (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("chain is not ergodic: {0}")]
    NonErgodic(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by a state-space cap.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
