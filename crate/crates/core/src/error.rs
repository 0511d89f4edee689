use thiserror::Error;

/// Errors produced by the graph, engine, and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// The node/edge structure violates a DAG invariant (cycle, duplicate
    /// node, self-loop, duplicate edge, unknown node).
    #[error("invalid graph: {0}")]
    GraphInvalid(String),

    /// An edge set refers to an arrow that is not part of the DAG in use.
    #[error("edge {from}->{to} is not an edge of the DAG")]
    InvalidEdge { from: String, to: String },

    /// A model definition is inconsistent (CPT shape, row sums, coefficient
    /// pattern, negative variance, ...).
    #[error("invalid model: {0}")]
    ModelInvalid(String),

    /// An operation was called with arguments outside its contract
    /// (overlapping variable selections, non-binary ACE variable, r too
    /// large, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A dense enumeration would exceed the configured state-space cap.
    #[error("state space too large: {size} entries exceeds cap {cap}")]
    StateSpaceTooLarge { size: u128, cap: u128 },

    /// A numeric routine failed (singular normal equations, non-PD
    /// covariance where positive definiteness is required, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// File or format problem while loading/storing models and data.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
