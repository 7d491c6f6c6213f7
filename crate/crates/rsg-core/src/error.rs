use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("not a code: {0}")]
    NotACode(String),
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("subshift precondition violated: {0}")]
    Subshift(String),
    #[error("graph is not irreducible")]
    NotIrreducible,
    #[error("graph has no irreducible core")]
    NoCore,
    #[error("empty clopen set")]
    EmptySet,
    #[error("input outside domain: {0}")]
    OutsideDomain(String),
    #[error("fuel exhausted after {0} steps")]
    Fuel(usize),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("class obstruction: {0}")]
    ClassObstruction(String),
    #[error("search depth exhausted after {0} refinement steps")]
    DepthExhausted(usize),
    #[error("not a cycle: boundary is {0}")]
    NotACycle(String),
    #[error("not in nucleus: {0}")]
    NotInNucleus(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("point not fixed: {0}")]
    NotFixed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
