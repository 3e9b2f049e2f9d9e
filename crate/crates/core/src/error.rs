use thiserror::Error;

/// Everything that can go wrong while building models, posteriors or intervals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error(
        "level {alpha} is outside the incredibility interval [{lower}, {upper}]; \
         use the deterministic one-sided credible interval instead"
    )]
    LevelOutsideJump { alpha: f64, lower: f64, upper: f64 },

    #[error("stochastic two-sided interval needs both tail levels in the jump: {0}")]
    TailOutsideJump(String),

    #[error("mixing probability {value} for {what} is outside [0, 1]")]
    MixingOutOfRange { what: &'static str, value: f64 },

    #[error("could not bracket a root for level {0}")]
    NoBracket(f64),

    #[error("quadrature did not converge: estimated error {0:e}")]
    Quadrature(f64),

    #[error("{reps} replications requested, at least {min} are required")]
    TooFewReplications { reps: u64, min: u64 },

    #[error("limit theorem does not apply: {0}")]
    NotApplicable(String),
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoBracket(_) | Error::Quadrature(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
