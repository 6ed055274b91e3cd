//! Recovery loops: one-dimensional phase shift, partially unwrapped
//! multidimensional projection, and the tilted two-dimensional variant.
//!
//! All three run the same adaptive loop. Each iteration picks a prime `p`
//! and a projection axis `m`, samples one unshifted and `r` shifted lines
//! of the residual signal, and keeps the bins that pass the collision test
//! on every shifted line. The registry is subtracted analytically: a stored
//! mode contributes to exactly one bin of each line, so the residual is
//! formed in the transform domain without extra samples.

mod config;
mod engine;
mod frame;

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

pub use config::{FallbackPolicy, SolverConfig};
use engine::{FrameOutcome, Run};
use frame::Frame;

use crate::maps::{Partition, TiltParams};
use crate::oracle::Oracle;
use crate::spectrum::{l2_error, SparseSpectrum};
use crate::{format, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub axis: usize,
    pub prime: u64,
    /// Bins decoded and applied to the registry.
    pub accepted: usize,
    /// `sum_h |F_0[h]|^2 / p` of the residual unshifted line.
    pub residual_energy: f64,
    pub registry_size: usize,
}

/// Mutable state of one solve.
#[derive(Clone, Debug, Default)]
pub struct SolveState {
    /// Recovered modes in the coordinates of the current frame.
    pub registry: BTreeMap<Vec<i64>, Complex64>,
    /// Iterations run so far (the current one, while running).
    pub iteration: usize,
    pub axis: usize,
    pub primes: Vec<u64>,
    pub progress: Vec<IterationRecord>,
    pub stall_count: usize,
    pub tilts_tried: Vec<TiltParams>,
    pub reshuffles: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub recovered: SparseSpectrum,
    /// Error against a known ground truth, see [`RecoveryReport::with_truth`].
    pub l2_error: Option<f64>,
    pub samples_used: u64,
    /// Nanoseconds spent in the solver's own arithmetic (sampling excluded).
    pub elapsed_ticks: u64,
    pub iterations: usize,
    pub fallback_used: bool,
    pub primes: Vec<u64>,
    pub progress: Vec<IterationRecord>,
}

impl RecoveryReport {
    pub fn with_truth(mut self, truth: &SparseSpectrum) -> Self {
        self.l2_error = Some(l2_error(truth, &self.recovered));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopCause {
    Stall,
    FallbackExhausted,
    IterationLimit,
    SparsityExceeded,
}

impl fmt::Display for StopCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopCause::Stall => "stall",
            StopCause::FallbackExhausted => "stall with all fallbacks exhausted",
            StopCause::IterationLimit => "iteration limit",
            StopCause::SparsityExceeded => "signal holds more modes than the declared sparsity",
        })
    }
}

/// What a failed solve had found when it stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialRecovery {
    pub registry: SparseSpectrum,
    pub cause: StopCause,
    pub iterations: usize,
    pub primes: Vec<u64>,
    pub samples_used: u64,
    pub fallback_used: bool,
}

impl PartialRecovery {
    /// The registry in spectrum-file format followed by `#` diagnostics.
    pub fn diagnostics(&self) -> String {
        let mut out = format::to_string(&self.registry);
        writeln!(out, "# cause {}", self.cause).unwrap();
        writeln!(out, "# iterations {}", self.iterations).unwrap();
        writeln!(out, "# samples {}", self.samples_used).unwrap();
        writeln!(out, "# fallback_used {}", self.fallback_used).unwrap();
        let primes: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        writeln!(out, "# primes {}", primes.join(" ")).unwrap();
        out
    }
}

/// Next frame to try after a stall.
#[derive(Clone, Debug, PartialEq)]
pub enum Fallback {
    Reshuffle(Partition),
    Tilt(TiltParams),
}

pub(crate) fn mix_seed(seed: u64, attempt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ attempt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Chooses the fallback after a stall in a frame built on `part`.
///
/// Two-axis problems get the next untried tilt; larger ones a reshuffled
/// partition with the same block sizes. Deterministic in `cfg.seed` and the
/// number of fallbacks already taken.
pub fn stall_fallback(
    state: &SolveState,
    cfg: &SolverConfig,
    part: &Partition,
) -> Result<Fallback> {
    match cfg.fallback {
        FallbackPolicy::None => Err(Error::FallbackExhausted),
        FallbackPolicy::Tilt if part.reduced_dim() == 2 => TiltParams::ENUMERATION
            .iter()
            .find(|tp| !state.tilts_tried.contains(tp))
            .map(|&tp| Fallback::Tilt(tp))
            .ok_or(Error::FallbackExhausted),
        _ if state.reshuffles < cfg.max_reshuffles && part.dim() > 1 => Ok(Fallback::Reshuffle(
            part.reshuffled(mix_seed(cfg.seed, state.reshuffles as u64)),
        )),
        _ => Err(Error::FallbackExhausted),
    }
}

fn drive<O: Oracle + ?Sized>(
    oracle: &O,
    initial: Frame,
    cfg: &SolverConfig,
    mut state: SolveState,
) -> Result<RecoveryReport> {
    let part = initial.partition().clone();
    if oracle.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: part.dim(),
            actual: oracle.dim(),
        });
    }
    cfg.validate(&part)?;

    let start = oracle.sample_count();
    let mut run = Run::new(oracle, cfg);
    std::mem::swap(&mut run.state, &mut state);
    let mut registry = SparseSpectrum::new(part.dim(), part.bandwidth())?;
    let mut frame = initial;
    let mut fallback_used = false;

    let failure = loop {
        match run.run_frame(&frame, &mut registry)? {
            FrameOutcome::Complete | FrameOutcome::Exhausted => break None,
            FrameOutcome::IterationLimit => break Some(StopCause::IterationLimit),
            FrameOutcome::SparsityExceeded => break Some(StopCause::SparsityExceeded),
            FrameOutcome::Stalled => match stall_fallback(&run.state, cfg, frame.partition()) {
                Ok(Fallback::Tilt(tp)) => {
                    run.state.tilts_tried.push(tp);
                    frame = Frame::Tilted(frame.partition().clone(), tp);
                    fallback_used = true;
                }
                Ok(Fallback::Reshuffle(p)) => {
                    run.state.reshuffles += 1;
                    frame = Frame::Blocks(p);
                    fallback_used = true;
                }
                Err(_) if cfg.fallback == FallbackPolicy::None => break Some(StopCause::Stall),
                Err(_) => break Some(StopCause::FallbackExhausted),
            },
        }
    };

    let samples_used = oracle.sample_count() - start;
    if let Some(cause) = failure {
        return Err(Error::Partial(Box::new(PartialRecovery {
            registry,
            cause,
            iterations: run.state.iteration,
            primes: run.state.primes,
            samples_used,
            fallback_used,
        })));
    }
    Ok(RecoveryReport {
        recovered: registry,
        l2_error: None,
        samples_used,
        elapsed_ticks: run.busy.as_nanos() as u64,
        iterations: run.state.iteration,
        fallback_used,
        primes: run.state.primes,
        progress: run.state.progress,
    })
}

/// Recovers a sparse signal on `R^d` through the partial unwrapping `part`.
///
/// `part = (d)` is full unwrapping and `part = (1, 1)` is the plain
/// two-dimensional projection method.
pub fn multi_phaseshift<O: Oracle + ?Sized>(
    oracle: &O,
    part: &Partition,
    cfg: &SolverConfig,
) -> Result<RecoveryReport> {
    drive(
        oracle,
        Frame::Blocks(part.clone()),
        cfg,
        SolveState::default(),
    )
}

/// The one-dimensional phase-shift algorithm.
pub fn phaseshift_1d<O: Oracle + ?Sized>(oracle: &O, cfg: &SolverConfig) -> Result<RecoveryReport> {
    if oracle.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: oracle.dim(),
        });
    }
    multi_phaseshift(oracle, &Partition::trivial(1, cfg.bandwidth)?, cfg)
}

/// Projection method on the plane rotated by `tp`; stalls move on to the
/// next tilt of [`TiltParams::ENUMERATION`].
pub fn tilted_phaseshift_2d<O: Oracle + ?Sized>(
    oracle: &O,
    tp: TiltParams,
    cfg: &SolverConfig,
) -> Result<RecoveryReport> {
    if oracle.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: oracle.dim(),
        });
    }
    let part = Partition::trivial(2, cfg.bandwidth)?;
    let mut cfg = cfg.clone();
    if cfg.fallback != FallbackPolicy::None {
        cfg.fallback = FallbackPolicy::Tilt;
    }
    let state = SolveState {
        tilts_tried: vec![tp],
        ..SolveState::default()
    };
    drive(oracle, Frame::Tilted(part, tp), &cfg, state)
}
