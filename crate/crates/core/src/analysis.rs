//! Probability that a random `k`-sparse spectrum hits the projection worst
//! case, as a closed-form bound and as a Monte-Carlo estimate.

use std::collections::HashMap;

use crate::maps::{unwrap_freq, Partition};
use crate::solver::mix_seed;
use crate::spectrum::random_instance;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CollisionBoundInput {
    pub bandwidth: u64,
    pub part: Partition,
    pub k: usize,
}

impl CollisionBoundInput {
    pub fn new(part: Partition, k: usize) -> Self {
        Self {
            bandwidth: part.bandwidth(),
            part,
            k,
        }
    }

    /// `sum_i N^{d_i} / N^d`: the fraction of the lattice covered by the
    /// axis-parallel lines through one point.
    fn line_fraction(&self) -> f64 {
        let n = self.bandwidth as f64;
        let s: f64 = self.part.blocks().iter().map(|&b| n.powi(b as i32)).sum();
        (s.ln() - self.part.dim() as f64 * n.ln()).exp()
    }
}

/// `1 - prod_{j=1..k} max(0, 1 - (j-1) S / N^d)` with `S = sum_i N^{d_i}`,
/// evaluated as a sum of `ln(1 - x)` terms so that `d = 1000` stays finite.
pub fn worst_case_bound(inp: &CollisionBoundInput) -> f64 {
    let x = inp.line_fraction();
    let mut log_prod = 0.0;
    for j in 1..inp.k {
        let a = j as f64 * x;
        if a >= 1.0 {
            return 1.0;
        }
        log_prod += (-a).ln_1p();
    }
    (-log_prod.exp_m1()).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionEstimate {
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / trials)`.
    pub stderr: f64,
    pub trials: u64,
}

/// Fraction of `trials` random supports of size `k` in which some
/// frequency shares its reduced coordinate with another one on every axis.
pub fn monte_carlo_collision_rate(
    inp: &CollisionBoundInput,
    trials: u64,
    seed: u64,
) -> Result<CollisionEstimate> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if inp.bandwidth != inp.part.bandwidth() {
        return Err(Error::InvalidConfig(format!(
            "bandwidth {} differs from the partition's {}",
            inp.bandwidth,
            inp.part.bandwidth()
        )));
    }
    let mut hits = 0u64;
    for trial in 0..trials {
        let spec = random_instance(inp.part.dim(), inp.bandwidth, inp.k, mix_seed(seed, trial))?;
        let reduced = spec
            .frequencies()
            .map(|w| unwrap_freq(w, &inp.part))
            .collect::<Result<Vec<_>>>()?;
        if fully_collided(&reduced, inp.part.reduced_dim()) {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    Ok(CollisionEstimate {
        rate,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        trials,
    })
}

fn fully_collided(points: &[Vec<i64>], r: usize) -> bool {
    if points.len() < 2 {
        return false;
    }
    let counts: Vec<HashMap<i64, usize>> = (0..r)
        .map(|q| {
            let mut m = HashMap::new();
            for p in points {
                *m.entry(p[q]).or_insert(0) += 1;
            }
            m
        })
        .collect();
    points.iter().any(|p| (0..r).all(|q| counts[q][&p[q]] > 1))
}
