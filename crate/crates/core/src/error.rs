use thiserror::Error;

use crate::solver::PartialRecovery;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("component {index} = {value} lies outside the band [{lo}, {hi}]")]
    OutOfBand {
        index: usize,
        value: i64,
        lo: i64,
        hi: i64,
    },

    #[error("non-finite sample coordinate at index {index}")]
    NonFiniteInput { index: usize },

    #[error("cannot draw {requested} distinct frequency vectors from a lattice of {available}")]
    TooManyModes { requested: u64, available: u128 },

    #[error("invalid bandwidth {0}: must be an even integer >= 2")]
    InvalidBandwidth(u64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid tilt ({base}, {height}, {hypo}): {reason}")]
    InvalidTilt {
        base: i64,
        height: i64,
        hypo: i64,
        reason: &'static str,
    },

    #[error("({v1}, {v2}) is not a point of the tilted lattice")]
    NotTiltLattice { v1: i64, v2: i64 },

    #[error("bin {bin} is below the energy floor")]
    EmptyBin { bin: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("all stall fallbacks exhausted")]
    FallbackExhausted,

    #[error("recovery incomplete ({})", .0.cause)]
    Partial(Box<PartialRecovery>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
