use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size ceiling exceeded: {what} would be {requested}, limit is {limit}")]
    SizeCeiling {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is disconnected: vertex {0} is unreachable")]
    Disconnected(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("distinct vertices {0} and {1} are mapped to the same point")]
    Collapse(String, String),

    #[error("sequence is not non-increasing at index {index}: {prev} < {next}")]
    NotMonotone { index: usize, prev: f64, next: f64 },

    #[error("value {value} at index {index} lies outside [{lo}, {hi}]")]
    OutOfRange {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("map is not ({lambda}, {k})-bi-Lipschitz: pair ({a}, {b}) has ratio {ratio}")]
    NotBiLipschitz {
        a: usize,
        b: usize,
        ratio: f64,
        lambda: f64,
        k: f64,
    },

    #[error("embedding does not match graph: {0}")]
    Mismatch(String),

    #[error("certificate version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
