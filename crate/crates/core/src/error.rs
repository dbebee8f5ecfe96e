use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("statistics mismatch: cannot combine bosonic and fermionic states")]
    StatisticsMismatch,

    #[error("particle number mismatch: expected {expected}, found {found}")]
    ParticleMismatch { expected: usize, found: usize },

    #[error("cannot subtract a particle from the vacuum sector")]
    VacuumSubtraction,

    #[error("operation requires a state with nonzero norm")]
    ZeroState,

    #[error("mode superposition has no nonzero coefficient")]
    ZeroSuperposition,

    #[error("invalid occupation vector {occ:?}: {reason}")]
    InvalidOccupation { occ: Vec<u32>, reason: &'static str },

    #[error("matrix is not symmetric (max deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("operation requires {expected} statistics")]
    WrongStatistics { expected: &'static str },

    #[error("protocol step {step} annihilated the state")]
    ProtocolFailure { step: usize },

    #[error("herald outcome has zero probability")]
    ZeroProbability,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
