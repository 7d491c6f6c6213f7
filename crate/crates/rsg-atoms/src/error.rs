use thiserror::Error;

#[derive(Debug, Error)]
pub enum AtomsError {
    #[error("invalid oracle: {0}")]
    InvalidOracle(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("missing witnesses: {0}")]
    MissingWitness(String),
    #[error("type graph did not stabilize: {0}")]
    Unstabilized(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Core(#[from] rsg_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, AtomsError>;
