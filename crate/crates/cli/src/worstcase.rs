use std::fmt;

use hdsfft::{
    monte_carlo_collision_rate, multi_phaseshift, tilted_phaseshift_2d, worst_case_bound,
    CollisionBoundInput, Complex64, Error, FallbackPolicy, Mode, Partition, SignalOracle,
    SolverConfig, SparseSpectrum, TiltParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::{derive_seed, Result, Settings};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCaseRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: usize,
    pub partition: String,
    pub k: usize,
    pub bound: f64,
    pub mc_rate: f64,
    pub mc_trials: u64,
    pub mc_stderr: f64,
}

/// Bound and Monte-Carlo estimate for every `(d, k)` of the sweep.
pub fn worstcase_rows(s: &Settings) -> Result<Vec<WorstCaseRow>> {
    let jobs: Vec<(usize, usize)> = s
        .dims
        .iter()
        .flat_map(|&d| s.worstcase_sparsities().into_iter().map(move |k| (d, k)))
        .collect();
    jobs.par_iter()
        .map(|&(d, k)| {
            let part = s.partition_for(d)?;
            let inp = CollisionBoundInput::new(part.clone(), k);
            let est = monte_carlo_collision_rate(
                &inp,
                s.mc_trials,
                derive_seed(s.seed, &[d as u64, k as u64]),
            )?;
            Ok(WorstCaseRow {
                n: s.bandwidth,
                d,
                partition: part.label(),
                k,
                bound: worst_case_bound(&inp),
                mc_rate: est.rate,
                mc_trials: est.trials,
                mc_stderr: est.stderr,
            })
        })
        .collect()
}

/// Outcome of the axis-aligned rectangle run with and without tilting.
#[derive(Clone, Debug)]
pub struct TiltDemo {
    pub truth: SparseSpectrum,
    /// Iterations until the parallel projection gave up, all accepting nothing.
    pub stall_iterations: Option<usize>,
    pub stall_recovered: usize,
    pub tilt: TiltParams,
    pub tilted: SparseSpectrum,
    pub tilted_samples: u64,
}

impl TiltDemo {
    pub fn stalled(&self) -> bool {
        self.stall_iterations.is_some() && self.stall_recovered == 0
    }

    pub fn exact(&self) -> bool {
        self.tilted.frequencies().eq(self.truth.frequencies())
            && hdsfft::l2_error(&self.truth, &self.tilted) < 1e-12
    }
}

impl fmt::Display for TiltDemo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let freqs: Vec<String> = self.truth.frequencies().map(|w| w.to_string()).collect();
        writeln!(f, "rectangle      {}", freqs.join(" "))?;
        match self.stall_iterations {
            Some(i) => writeln!(
                f,
                "parallel       stalled after {i} iterations, {} modes found",
                self.stall_recovered
            )?,
            None => writeln!(f, "parallel       did not stall")?,
        }
        let tp = self.tilt;
        writeln!(
            f,
            "tilt ({},{},{})  {} of {} modes, {} samples, {}",
            tp.base(),
            tp.height(),
            tp.hypo(),
            self.tilted.len(),
            self.truth.len(),
            self.tilted_samples,
            if self.exact() { "exact" } else { "inexact" }
        )
    }
}

/// The four corners `(1,1), (1,2), (2,1), (2,2)`: every parallel projection
/// pairs them up, a (3,4,5) tilt separates them.
pub fn demo_tilt(bandwidth: u64) -> Result<TiltDemo> {
    let one = Complex64::new(1.0, 0.0);
    let truth = SparseSpectrum::from_modes(
        2,
        bandwidth,
        [[1, 1], [1, 2], [2, 1], [2, 2]]
            .into_iter()
            .map(|w| Mode::new(w.to_vec(), one)),
    )?;
    let oracle = SignalOracle::from_spectrum(&truth);
    let mut cfg = SolverConfig::new(4, bandwidth);
    cfg.fallback = FallbackPolicy::None;
    let (stall_iterations, stall_recovered) =
        match multi_phaseshift(&oracle, &Partition::trivial(2, bandwidth)?, &cfg) {
            Err(Error::Partial(p)) => (Some(p.iterations), p.registry.len()),
            Ok(r) => (None, r.recovered.len()),
            Err(e) => return Err(e.into()),
        };
    let tilt = TiltParams::ENUMERATION[0];
    let report = tilted_phaseshift_2d(&oracle, tilt, &cfg)?;
    Ok(TiltDemo {
        truth,
        stall_iterations,
        stall_recovered,
        tilt,
        tilted: report.recovered,
        tilted_samples: report.samples_used,
    })
}
