use std::fmt;
use std::str::FromStr;

use crate::maps::Partition;
use crate::{Error, Result};

/// What to do when a projection loop stops making progress.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FallbackPolicy {
    /// Fail with a partial result.
    None,
    /// Re-block over a seeded random permutation of the dimensions.
    Reshuffle,
    /// Tilt two-axis problems; reshuffle anything else.
    #[default]
    Tilt,
}

impl FromStr for FallbackPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "reshuffle" => Ok(Self::Reshuffle),
            "tilt" => Ok(Self::Tilt),
            other => Err(Error::InvalidConfig(format!(
                "unknown fallback policy '{other}'"
            ))),
        }
    }
}

impl fmt::Display for FallbackPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Reshuffle => "reshuffle",
            Self::Tilt => "tilt",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Sparsity, or an upper bound on it.
    pub k: usize,
    /// Per-dimension bandwidth `N`.
    pub bandwidth: u64,
    /// Line length is the i-th prime `>= c * k*`.
    pub c: usize,
    /// Phase shift; `None` means `1 / (2 N^{max d_q})`.
    pub epsilon: Option<f64>,
    /// Relative tolerance of the magnitude-ratio collision test.
    pub tolerance: f64,
    /// Bins below `energy_floor * p * (largest coefficient seen)` are empty.
    pub energy_floor: f64,
    /// Registry entries with smaller magnitude are dropped.
    pub prune_floor: f64,
    /// Maximum distance of a decoded frequency from the nearest integer.
    pub round_tolerance: f64,
    pub max_iterations: usize,
    /// Consecutive iterations without an accepted mode before falling back;
    /// `None` means two full axis cycles.
    pub stall_limit: Option<usize>,
    pub fallback: FallbackPolicy,
    pub max_reshuffles: usize,
    /// Seeds the dimension permutations used by the reshuffle fallback.
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(k: usize, bandwidth: u64) -> Self {
        Self {
            k,
            bandwidth,
            c: 5,
            epsilon: None,
            tolerance: 1e-6,
            energy_floor: 1e-8,
            prune_floor: 1e-8,
            round_tolerance: 0.01,
            max_iterations: 1000,
            stall_limit: None,
            fallback: FallbackPolicy::Tilt,
            max_reshuffles: 4,
            seed: 0,
        }
    }

    pub fn epsilon_for(&self, part: &Partition) -> f64 {
        self.epsilon.unwrap_or_else(|| part.default_epsilon())
    }

    pub fn stall_limit_for(&self, reduced_dim: usize) -> usize {
        self.stall_limit.unwrap_or(2 * reduced_dim)
    }

    pub fn validate(&self, part: &Partition) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.c < 1 {
            return bad("c must be at least 1".into());
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if self.bandwidth != part.bandwidth() {
            return bad(format!(
                "bandwidth {} differs from the partition's {}",
                self.bandwidth,
                part.bandwidth()
            ));
        }
        let eps = self.epsilon_for(part);
        if eps.is_nan() || eps <= 0.0 || eps * part.max_block_bandwidth() as f64 > 0.5 {
            return bad(format!(
                "epsilon {eps} must lie in (0, 1/(2*{})]",
                part.max_block_bandwidth()
            ));
        }
        if !(self.tolerance > 0.0 && self.round_tolerance > 0.0 && self.round_tolerance < 0.5) {
            return bad("tolerances must be positive (round tolerance below 1/2)".into());
        }
        if self.energy_floor < 0.0 || self.prune_floor < 0.0 {
            return bad("floors must be non-negative".into());
        }
        Ok(())
    }
}
