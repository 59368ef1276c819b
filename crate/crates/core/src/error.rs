use thiserror::Error;

/// Everything that can go wrong across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid team structure: {0}")]
    InvalidStructure(String),

    #[error("game is not team-symmetric with common payoffs: {reason} (profile {profile:?}, permutation {permutation:?})")]
    SymmetryViolation {
        reason: String,
        profile: Vec<usize>,
        permutation: Vec<usize>,
    },

    #[error("zero-sum generation requires exactly two teams, got {0}")]
    ZeroSumRequiresTwoTeams(usize),

    #[error("joint action space too large for enumeration: {0}")]
    TooLarge(String),

    #[error("no equilibrium found within budget: {0}")]
    NoEquilibriumFound(String),

    #[error("non-finite gradient encountered")]
    NonFiniteGradient,

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("equilibrium set is empty")]
    EmptyEquilibriumSet,

    #[error("invalid game file: {0}")]
    InvalidGameFile(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
