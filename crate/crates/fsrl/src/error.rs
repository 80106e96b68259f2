//! Crate-wide error type.

/// Errors produced by model construction, solvers, environments and the
/// experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model violates a structural requirement; the message names the
    /// failing property.
    #[error("structural check failed: {0}")]
    Structure(String),

    /// An iterative solver reached its iteration budget.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A least-squares problem has linearly dependent columns.
    #[error("rank deficient: {0}")]
    RankDeficient(String),

    /// A terminated episode was stepped without a reset.
    #[error("episode already terminated; call reset before stepping")]
    EpisodeOver,

    /// A learner produced a non-finite quantity.
    #[error("divergence detected: {0}")]
    Diverged(String),

    /// A bisection search could not bracket its target.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// A text model, map or config file failed to parse.
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    /// An experiment configuration is invalid; the message names the field.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
