use thiserror::Error;

use crate::graph::Link;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("cannot remove {0}: link not present")]
    MissingLink(Link),

    #[error("cannot add {0}: link already present")]
    DuplicateLink(Link),

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),

    #[error("graph is disconnected ({components} components); operation requires an ergodic walk")]
    Disconnected { components: usize },

    #[error("graphs have different vertex sets ({left} vs {right} vertices)")]
    VertexSetMismatch { left: usize, right: usize },

    #[error("distribution length mismatch ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("distribution is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("{0}")]
    Guard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
