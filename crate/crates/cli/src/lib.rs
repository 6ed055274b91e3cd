//! Driver for the `hdsfft` binary: option resolution, benchmark sweeps,
//! single solves and the worst-case tables.

pub mod bench;
pub mod options;
pub mod solve;
pub mod worstcase;

use std::io;

pub use bench::{run_bench, summarize, BenchRow, BenchSummary};
pub use options::{Cli, Command, Settings};
pub use solve::{solve, SolveOutcome};
pub use worstcase::{demo_tilt, worstcase_rows, TiltDemo, WorstCaseRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hdsfft::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// splitmix64 of `seed` combined with the given words.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(seed, |acc, &w| {
        let mut z = acc
            ^ w.wrapping_add(0x9E37_79B9_7F4A_7C15)
                .wrapping_mul(0xD6E8_FEB8_6659_FD93);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}
