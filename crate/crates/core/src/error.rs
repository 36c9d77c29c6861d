use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("{0}")]
    InvalidName(String),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge endpoint {endpoint} out of range for {n} vertices")]
    EndpointOutOfRange { endpoint: usize, n: usize },
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("lambda has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("configuration holds zero robots")]
    ZeroRobots,
    #[error("robot count must be at least 1")]
    InvalidRobotCount,
    #[error("moves are defined over different occupied orbits")]
    IncomparableMoves,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("unsupported format version {0}")]
    VersionMismatch(u64),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("exploration budget of {0} states exceeded")]
    BudgetExceeded(usize),
    #[error("internal error: {0}")]
    Internal(String),
}
