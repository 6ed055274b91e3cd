//! The adaptive projection loop shared by every solver entry point.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use super::frame::Frame;
use super::{IterationRecord, SolveState, SolverConfig};
use crate::dft::{collision_test, decode_coefficient, decode_frequency, BinSpectrum, DftEngine};
use crate::oracle::Oracle;
use crate::primes::nth_prime_at_least;
use crate::spectrum::{cis_turns, Mode, SparseSpectrum};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum FrameOutcome {
    /// `|R| == k` with nothing left over.
    Complete,
    /// Every line of an iteration was empty.
    Exhausted,
    Stalled,
    IterationLimit,
    /// `|R| == k` but the residual still holds energy.
    SparsityExceeded,
}

pub(crate) struct Run<'a, O: Oracle + ?Sized> {
    oracle: &'a O,
    cfg: &'a SolverConfig,
    dft: DftEngine,
    pub state: SolveState,
    /// Time spent outside oracle evaluation.
    pub busy: Duration,
    /// Largest `|bin| / p` of any raw unshifted line so far.
    scale: f64,
}

struct Decoded {
    coords: Vec<i64>,
    coefficient: Complex64,
}

impl<'a, O: Oracle + ?Sized> Run<'a, O> {
    pub fn new(oracle: &'a O, cfg: &'a SolverConfig) -> Self {
        Self {
            oracle,
            cfg,
            dft: DftEngine::new(),
            state: SolveState::default(),
            busy: Duration::ZERO,
            scale: 0.0,
        }
    }

    /// Iterates in `frame` until it completes, runs dry or stalls. The
    /// registry is read from and written back to `full` in original
    /// coordinates.
    pub fn run_frame(&mut self, frame: &Frame, full: &mut SparseSpectrum) -> Result<FrameOutcome> {
        let clock = Instant::now();
        self.state.registry = full
            .iter()
            .map(|(w, &a)| Ok((frame.to_frame(w)?, a)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        self.state.stall_count = 0;
        self.busy += clock.elapsed();

        let eps = self
            .cfg
            .epsilon_for(frame.partition())
            .min(frame.natural_epsilon());
        let stall_limit = self.cfg.stall_limit_for(frame.reduced_dim()).max(1);
        let outcome = loop {
            if self.state.registry.len() >= self.cfg.k {
                break FrameOutcome::Complete;
            }
            if self.state.iteration >= self.cfg.max_iterations {
                break FrameOutcome::IterationLimit;
            }
            match self.iterate(frame, eps)? {
                Some(end) => break end,
                None if self.state.stall_count >= stall_limit => break FrameOutcome::Stalled,
                None => {}
            }
        };

        let clock = Instant::now();
        let mut back = SparseSpectrum::new(full.dim(), full.bandwidth())?;
        for (u, &a) in &self.state.registry {
            back.insert(Mode::new(frame.to_full(u)?, a))?;
        }
        *full = back;
        self.busy += clock.elapsed();
        Ok(outcome)
    }

    /// One pass: sample, transform, decode clean bins, update the registry.
    /// Returns a terminal outcome if this pass ended the frame.
    fn iterate(&mut self, frame: &Frame, eps: f64) -> Result<Option<FrameOutcome>> {
        let cfg = self.cfg;
        let r = frame.reduced_dim();
        self.state.iteration += 1;
        let i = self.state.iteration;
        let m = (i - 1) % r;
        let k_star = cfg.k - self.state.registry.len();
        let p = nth_prime_at_least((cfg.c * k_star) as u64, i) as usize;
        self.state.axis = m;
        self.state.primes.push(p as u64);

        let unshifted = frame.sample(self.oracle, m, None, p, eps)?;
        let shifted = (0..r)
            .map(|n| frame.sample(self.oracle, m, Some(n), p, eps))
            .collect::<Result<Vec<_>>>()?;

        let clock = Instant::now();
        let mut bins0 = self.dft.dft(&unshifted);
        let mut bins: Vec<BinSpectrum> = shifted.iter().map(|line| self.dft.dft(line)).collect();
        self.scale = self.scale.max(bins0.max_magnitude() / p as f64);

        // Residual: each stored mode occupies exactly one bin per line.
        let pf = p as f64;
        for (u, &a) in &self.state.registry {
            let h = u[m].rem_euclid(p as i64) as usize;
            bins0.bins[h] -= a * pf;
            for (n, b) in bins.iter_mut().enumerate() {
                b.bins[h] -= a * pf * cis_turns(eps * u[n] as f64);
            }
        }
        bins0.resort();
        for b in &mut bins {
            b.resort();
        }

        let floor = cfg.energy_floor * pf * self.scale;
        let residual_energy = bins0.energy();
        let exhausted =
            bins0.max_magnitude() <= floor && bins.iter().all(|b| b.max_magnitude() <= floor);

        let mut decoded = Vec::new();
        let mut used_bins = HashSet::new();
        if !exhausted {
            for &h in bins0.permutation.iter().take(k_star) {
                if bins0.bins[h].norm() <= floor {
                    break;
                }
                if let Some(d) = self.decode_bin(frame, &bins0, &bins, h, m, p, eps, floor) {
                    used_bins.insert(h);
                    decoded.push(d);
                }
            }
        }

        let accepted = decoded.len();
        for d in decoded {
            if let Some(stored) = self.state.registry.get_mut(&d.coords) {
                // The residual holds (true - stored) at a known frequency.
                *stored += d.coefficient;
            } else if self.state.registry.len() < cfg.k && d.coefficient.norm() >= cfg.prune_floor {
                self.state.registry.insert(d.coords, d.coefficient);
            }
        }
        self.state
            .registry
            .retain(|_, a| a.norm() >= cfg.prune_floor);

        let leftover = bins0
            .permutation
            .iter()
            .take_while(|&&h| bins0.bins[h].norm() > floor)
            .any(|h| !used_bins.contains(h));
        self.busy += clock.elapsed();

        self.state.progress.push(IterationRecord {
            iteration: i,
            axis: m,
            prime: p as u64,
            accepted,
            residual_energy,
            registry_size: self.state.registry.len(),
        });

        if accepted == 0 {
            self.state.stall_count += 1;
        } else {
            self.state.stall_count = 0;
        }

        Ok(if exhausted {
            Some(FrameOutcome::Exhausted)
        } else if self.state.registry.len() >= cfg.k {
            Some(if leftover {
                FrameOutcome::SparsityExceeded
            } else {
                FrameOutcome::Complete
            })
        } else {
            None
        })
    }

    /// Decodes bin `h` if every shifted line agrees it holds a single mode.
    #[allow(clippy::too_many_arguments)]
    fn decode_bin(
        &self,
        frame: &Frame,
        bins0: &BinSpectrum,
        bins: &[BinSpectrum],
        h: usize,
        m: usize,
        p: usize,
        eps: f64,
        floor: f64,
    ) -> Option<Decoded> {
        let cfg = self.cfg;
        let mut coords = Vec::with_capacity(bins.len());
        for b in bins {
            if !collision_test(bins0, b, h, cfg.tolerance, floor).ok()? {
                return None;
            }
            let x = decode_frequency(bins0, b, h, eps).ok()?;
            let rounded = x.round();
            if (x - rounded).abs() > cfg.round_tolerance {
                return None;
            }
            coords.push(rounded as i64);
        }
        // The projected coordinate must alias to the bin it was found in.
        if coords[m].rem_euclid(p as i64) as usize != h {
            return None;
        }
        frame.to_full(&coords).ok()?;

        let coefficient = decode_coefficient(bins0, h, p);
        let slack = cfg.tolerance + TAU * eps * cfg.round_tolerance;
        for (n, b) in bins.iter().enumerate() {
            let predicted = coefficient * p as f64 * cis_turns(eps * coords[n] as f64);
            if (predicted - b.bins[h]).norm() > slack * b.bins[h].norm() {
                return None;
            }
        }
        Some(Decoded {
            coords,
            coefficient,
        })
    }
}
