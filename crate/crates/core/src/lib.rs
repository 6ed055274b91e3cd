//! Deterministic sublinear-time sparse Fourier transform for signals that
//! are sums of a few complex exponentials with integer frequency vectors in
//! many dimensions.
//!
//! The recovery pipeline samples the signal along short prime-length lines,
//! locates each frequency from the phase of an `eps`-shifted copy of the
//! line and subtracts what it has found before the next pass. High
//! dimensions are handled by unwrapping blocks of coordinates into single
//! axes ([`Partition`]); axis-aligned worst cases are broken by rational
//! rotations ([`TiltParams`]).
//!
//! ```
//! use hdsfft::{multi_phaseshift, random_instance, Partition, SignalOracle, SolverConfig};
//!
//! let truth = random_instance(8, 20, 5, 42).unwrap();
//! let oracle = SignalOracle::from_spectrum(&truth);
//! let part = Partition::uniform(8, 4, 20).unwrap();
//! let cfg = SolverConfig::new(5, 20);
//! let report = multi_phaseshift(&oracle, &part, &cfg).unwrap();
//! assert_eq!(report.recovered.len(), 5);
//! assert!(hdsfft::l2_error(&truth, &report.recovered) < 1e-9);
//! ```

pub mod analysis;
pub mod dft;
mod error;
pub mod format;
pub mod maps;
pub mod oracle;
pub mod primes;
pub mod solver;
pub mod spectrum;

pub use analysis::{
    monte_carlo_collision_rate, worst_case_bound, CollisionBoundInput, CollisionEstimate,
};
pub use dft::{
    collision_test, decode_coefficient, decode_frequency, dft, dft_direct, sample_line,
    BinSpectrum, DftEngine, SampleLine,
};
pub use error::{Error, Result};
pub use maps::{
    tilt_freq, tilt_time, untilt_freq, unwrap_freq, unwrap_time, wrap_freq, Partition, TiltParams,
};
pub use oracle::{residual_oracle, Oracle, ResidualOracle, SignalOracle};
pub use primes::{is_prime, next_prime_at_least, nth_prime_at_least};
pub use solver::{
    multi_phaseshift, phaseshift_1d, stall_fallback, tilted_phaseshift_2d, Fallback,
    FallbackPolicy, PartialRecovery, RecoveryReport, SolveState, SolverConfig, StopCause,
};
pub use spectrum::{l2_error, random_instance, FrequencyVector, Mode, SparseSpectrum};

pub use num_complex::Complex64;
