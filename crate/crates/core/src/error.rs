use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node index {node} out of range for graph with {p} nodes")]
    NodeOutOfRange { node: usize, p: usize },

    #[error("invalid node query: {0}")]
    InvalidQuery(String),

    #[error("graph contains a directed cycle")]
    Cyclic,

    #[error("graphs have different node counts ({0} vs {1})")]
    NodeCountMismatch(usize, usize),

    #[error("malformed edge list at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },

    #[error("tied value {value} in column; rank statistics require distinct observations")]
    Tie { value: f64 },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("zero variance")]
    ZeroVariance,

    #[error("value {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("columns ({0}, {1}): {2}")]
    ColumnPair(usize, usize, Box<Error>),

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("principal submatrix on {indices:?} is not positive definite")]
    NotPositiveDefinite { indices: Vec<usize> },

    #[error("matrix is singular")]
    Singular,

    #[error("degenerate partial correlation: denominator {0} too close to zero")]
    DegenerateCorrelation(f64),

    #[error("conditioning size out of range: {0}")]
    OrderOutOfRange(String),

    #[error("insufficient sample size: n = {n}, |S| = {s_size} leaves no degrees of freedom")]
    InsufficientSample { n: usize, s_size: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("missing separating set for pair ({0}, {1})")]
    MissingSepset(usize, usize),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
