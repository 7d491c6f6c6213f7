use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input bundle lacks `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Core(#[from] rsg_core::Error),
    #[error(transparent)]
    Atoms(#[from] rsg_atoms::AtomsError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for a definite negative answer, 2 for usage, input and budget errors.
    pub fn exit_code(&self) -> u8 {
        use rsg_atoms::AtomsError as A;
        use rsg_core::Error as E;
        match self {
            CliError::Core(E::ClassObstruction(_) | E::NoCore | E::NotFixed(_) | E::NotInNucleus(_) | E::NotInjective(_)) => 1,
            CliError::Atoms(A::Core(E::ClassObstruction(_) | E::NoCore)) => 1,
            _ => 2,
        }
    }
}
