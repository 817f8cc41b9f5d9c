use thiserror::Error;

/// Errors produced by distance spaces, samplers, estimators and parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node {node} is out of range for a space of {n} elements")]
    InvalidNode { node: usize, n: usize },

    #[error("no path between {u} and {v}")]
    UnreachablePair { u: usize, v: usize },

    #[error("graph is disconnected: node {node} is unreachable from {from}")]
    DisconnectedGraph { from: usize, node: usize },

    #[error("instance too small: need at least {required} elements, got {n}")]
    InstanceTooSmall { n: usize, required: usize },

    #[error("probabilities sum to {sum}, expected 1")]
    BadDistribution { sum: f64 },

    #[error("anchor {anchor} yields all-zero rough estimates")]
    BadAnchor { anchor: usize },

    #[error("all pairwise distances are zero")]
    DegenerateMetric,

    #[error("queries by coordinates need a Euclidean point set")]
    UnsupportedQuery,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: negative edge weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },

    #[error("not a metric: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    NotAMetric { i: usize, j: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
