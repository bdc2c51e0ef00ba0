use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Pre- and post-selected states are (nearly) orthogonal.
    #[error("post-selection singular: transition probability {probability:e} is at or below the cutoff {cutoff:e}")]
    PostSelectionSingular { probability: f64, cutoff: f64 },

    #[error("correlator chain needs at least 3 measurements, got {0}")]
    ChainTooShort(usize),

    #[error("brute-force enumeration limited to n <= {max}, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error(
        "detector grid too small: {outside_mass:e} of the probability falls outside the array"
    )]
    GridTooSmall { outside_mass: f64 },

    #[error("insufficient counts: {total} photons (need at least {required})")]
    InsufficientCounts { total: u64, required: u64 },

    #[error("pointer coupling must be strictly positive to invert the readout relations")]
    ZeroCoupling,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed counts file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors raised by a numerical guard rather than bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::PostSelectionSingular { .. }
                | Error::EnumerationTooLarge { .. }
                | Error::GridTooSmall { .. }
                | Error::ZeroCoupling
        )
    }
}
