use crate::rational::Rational;

/// Consecutive sample times whose Prokhorov gap exceeds `lipschitz * (t - s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzViolation {
    pub s: Rational,
    pub t: Rational,
    pub gap: Rational,
    pub bound: Rational,
    pub lipschitz: Rational,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the operation's domain (bad mass, bad time, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid metric space: {0}")]
    Metric(String),

    #[error("objects live on different metric spaces: {0}")]
    SpaceMismatch(String),

    /// A hypothesis of a construction does not hold for the given inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "declared Lipschitz constant {} violated between t={} and t={}: q = {} > {}",
        .0.lipschitz, .0.s, .0.t, .0.gap, .0.bound
    )]
    Lipschitz(Box<LipschitzViolation>),

    #[error("subset oracle supports at most {limit} points, space has {points}")]
    OracleTooLarge { points: usize, limit: usize },

    /// A certified bound failed to hold. Always a bug.
    #[error("internal invariant failure: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Domain(_)
            | Error::Metric(_)
            | Error::SpaceMismatch(_)
            | Error::Precondition(_)
            | Error::Lipschitz(_)
            | Error::OracleTooLarge { .. } => 2,
            Error::Invariant(_) => 3,
            Error::Parse(_) | Error::Io(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
