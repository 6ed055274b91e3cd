//! Sample oracles: black-box access to `f(t)` at arbitrary real points,
//! with a counter of how many points were requested.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::spectrum::{cis_turns, sparse_dot, support_of, SparseSpectrum};
use crate::{Error, Result};

/// Point-evaluation access to a signal on `R^d`.
pub trait Oracle: Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates the signal at `t`. Each call is one sample.
    fn evaluate(&self, t: &[f64]) -> Result<Complex64>;

    /// Number of samples drawn from the underlying signal so far.
    fn sample_count(&self) -> u64;
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, t: &[f64]) -> Result<Complex64> {
        (**self).evaluate(t)
    }

    fn sample_count(&self) -> u64 {
        (**self).sample_count()
    }
}

pub(crate) fn check_point(dim: usize, t: &[f64]) -> Result<()> {
    if t.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: t.len(),
        });
    }
    if let Some(index) = t.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    Ok(())
}

type Rule = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

enum Evaluator {
    /// Exponential sum over integer frequency vectors.
    Sum(Vec<(Vec<i64>, Complex64)>),
    Custom(Arc<Rule>),
}

/// A signal with a sample counter.
pub struct SignalOracle {
    dim: usize,
    eval: Evaluator,
    samples: AtomicU64,
}

impl fmt::Debug for SignalOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.eval {
            Evaluator::Sum(m) => format!("sum of {} modes", m.len()),
            Evaluator::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("SignalOracle")
            .field("dim", &self.dim)
            .field("rule", &kind)
            .field("samples", &self.sample_count())
            .finish()
    }
}

impl SignalOracle {
    /// The synthetic signal `f(t) = sum_j a_j exp(2 pi i w_j . t)`.
    pub fn from_spectrum(spectrum: &SparseSpectrum) -> Self {
        let modes = spectrum
            .iter()
            .map(|(w, &a)| (w.components().to_vec(), a))
            .collect();
        Self {
            dim: spectrum.dim(),
            eval: Evaluator::Sum(modes),
            samples: AtomicU64::new(0),
        }
    }

    pub fn from_fn<F>(dim: usize, rule: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            dim,
            eval: Evaluator::Custom(Arc::new(rule)),
            samples: AtomicU64::new(0),
        }
    }

    pub fn reset_count(&self) {
        self.samples.store(0, Ordering::Relaxed);
    }
}

impl Oracle for SignalOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, t: &[f64]) -> Result<Complex64> {
        check_point(self.dim, t)?;
        self.samples.fetch_add(1, Ordering::Relaxed);
        Ok(match &self.eval {
            Evaluator::Sum(modes) => {
                // Sample points produced by the solver touch only a few
                // coordinates, so the dot products run over the support.
                let support = support_of(t);
                modes
                    .iter()
                    .map(|(w, a)| a * cis_turns(sparse_dot(w, &support)))
                    .sum()
            }
            Evaluator::Custom(rule) => rule(t),
        })
    }

    fn sample_count(&self) -> u64 {
        self.samples.load(Ordering::Relaxed)
    }
}

/// `base(t) - sum_{(w, a) in found} a exp(2 pi i w . t)`.
///
/// The subtracted sum is synthesized, so only `base` evaluations are
/// counted as samples.
pub struct ResidualOracle<'a, O: Oracle + ?Sized> {
    base: &'a O,
    found: &'a SparseSpectrum,
}

pub fn residual_oracle<'a, O: Oracle + ?Sized>(
    base: &'a O,
    found: &'a SparseSpectrum,
) -> Result<ResidualOracle<'a, O>> {
    if found.dim() != base.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            actual: found.dim(),
        });
    }
    Ok(ResidualOracle { base, found })
}

impl<O: Oracle + ?Sized> Oracle for ResidualOracle<'_, O> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn evaluate(&self, t: &[f64]) -> Result<Complex64> {
        Ok(self.base.evaluate(t)? - self.found.evaluate(t))
    }

    fn sample_count(&self) -> u64 {
        self.base.sample_count()
    }
}
