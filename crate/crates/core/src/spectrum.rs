//! Frequency vectors, modes and sparse spectra.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Integer frequency vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrequencyVector(Vec<i64>);

impl FrequencyVector {
    pub fn new(components: Vec<i64>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// Checks every component against `[-N/2, N/2)`.
    pub fn check_band(&self, bandwidth: u64) -> Result<()> {
        let half = (bandwidth / 2) as i64;
        for (index, &value) in self.0.iter().enumerate() {
            if value < -half || value >= half {
                return Err(Error::OutOfBand {
                    index,
                    value,
                    lo: -half,
                    hi: half - 1,
                });
            }
        }
        Ok(())
    }

    pub fn dot(&self, t: &[f64]) -> f64 {
        self.0.iter().zip(t).map(|(&w, &x)| w as f64 * x).sum()
    }
}

impl From<Vec<i64>> for FrequencyVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// One frequency vector with its complex coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub frequency: FrequencyVector,
    pub coefficient: Complex64,
}

impl Mode {
    pub fn new(frequency: impl Into<FrequencyVector>, coefficient: Complex64) -> Self {
        Self {
            frequency: frequency.into(),
            coefficient,
        }
    }
}

/// A set of modes keyed by frequency vector.
///
/// Keys are unique and iteration order is lexicographic in the frequency
/// vector, which makes the text serialization deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSpectrum {
    dim: usize,
    bandwidth: u64,
    modes: BTreeMap<FrequencyVector, Complex64>,
}

pub(crate) fn check_bandwidth(bandwidth: u64) -> Result<()> {
    if bandwidth < 2 || bandwidth % 2 != 0 {
        return Err(Error::InvalidBandwidth(bandwidth));
    }
    Ok(())
}

impl SparseSpectrum {
    pub fn new(dim: usize, bandwidth: u64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        Ok(Self {
            dim,
            bandwidth,
            modes: BTreeMap::new(),
        })
    }

    pub fn from_modes(
        dim: usize,
        bandwidth: u64,
        modes: impl IntoIterator<Item = Mode>,
    ) -> Result<Self> {
        let mut s = Self::new(dim, bandwidth)?;
        for m in modes {
            s.insert(m)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> u64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Inserts or replaces a mode. A zero coefficient removes the key.
    pub fn insert(&mut self, mode: Mode) -> Result<Option<Complex64>> {
        if mode.frequency.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: mode.frequency.dim(),
            });
        }
        mode.frequency.check_band(self.bandwidth)?;
        if mode.coefficient == Complex64::new(0.0, 0.0) {
            return Ok(self.modes.remove(&mode.frequency));
        }
        Ok(self.modes.insert(mode.frequency, mode.coefficient))
    }

    pub fn remove(&mut self, frequency: &FrequencyVector) -> Option<Complex64> {
        self.modes.remove(frequency)
    }

    pub fn get(&self, frequency: &FrequencyVector) -> Option<Complex64> {
        self.modes.get(frequency).copied()
    }

    pub fn contains(&self, frequency: &FrequencyVector) -> bool {
        self.modes.contains_key(frequency)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, FrequencyVector, Complex64> {
        self.modes.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.modes.iter().map(|(w, &a)| Mode {
            frequency: w.clone(),
            coefficient: a,
        })
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &FrequencyVector> {
        self.modes.keys()
    }

    /// Exponential sum `sum_j a_j exp(2 pi i w_j . t)`.
    pub fn evaluate(&self, t: &[f64]) -> Complex64 {
        let support = support_of(t);
        self.modes
            .iter()
            .map(|(w, &a)| a * cis_turns(sparse_dot(w.components(), &support)))
            .sum()
    }

    /// Splits the spectrum into (first `n` modes, remaining modes) in key order.
    pub fn split_at(&self, n: usize) -> (SparseSpectrum, SparseSpectrum) {
        let mut head = Self {
            dim: self.dim,
            bandwidth: self.bandwidth,
            modes: BTreeMap::new(),
        };
        let mut tail = head.clone();
        for (i, (w, &a)) in self.modes.iter().enumerate() {
            if i < n {
                head.modes.insert(w.clone(), a);
            } else {
                tail.modes.insert(w.clone(), a);
            }
        }
        (head, tail)
    }
}

impl<'a> IntoIterator for &'a SparseSpectrum {
    type Item = (&'a FrequencyVector, &'a Complex64);
    type IntoIter = btree_map::Iter<'a, FrequencyVector, Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.modes.iter()
    }
}

/// `exp(2 pi i x)` with `x` reduced to `[-1/2, 1/2]` first.
#[inline]
pub(crate) fn cis_turns(x: f64) -> Complex64 {
    let frac = x - x.round();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// Nonzero entries of `t`.
pub(crate) fn support_of(t: &[f64]) -> Vec<(usize, f64)> {
    t.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(i, &x)| (i, x))
        .collect()
}

#[inline]
pub(crate) fn sparse_dot(w: &[i64], support: &[(usize, f64)]) -> f64 {
    support.iter().map(|&(i, x)| w[i] as f64 * x).sum()
}

/// `N^d` if it fits in a `u128`.
pub(crate) fn lattice_size(dim: usize, bandwidth: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..dim {
        acc = acc.checked_mul(bandwidth as u128)?;
    }
    Some(acc)
}

/// Draws `k` distinct frequency vectors uniformly from `[-N/2, N/2)^d` with
/// unit-magnitude coefficients `exp(2 pi i theta)`, `theta ~ U[0, 1)`.
pub fn random_instance(dim: usize, bandwidth: u64, k: usize, seed: u64) -> Result<SparseSpectrum> {
    check_bandwidth(bandwidth)?;
    let mut spectrum = SparseSpectrum::new(dim, bandwidth)?;
    let capacity = lattice_size(dim, bandwidth);
    if let Some(cap) = capacity {
        if k as u128 > cap {
            return Err(Error::TooManyModes {
                requested: k as u64,
                available: cap,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (bandwidth / 2) as i64;

    let freqs: Vec<Vec<i64>> = match capacity {
        // Small lattices: sample distinct linear indices so that k close to
        // N^d does not degenerate into coupon collecting.
        Some(cap) if cap <= 1 << 24 => rand::seq::index::sample(&mut rng, cap as usize, k)
            .into_iter()
            .map(|mut idx| {
                (0..dim)
                    .map(|_| {
                        let digit = (idx % bandwidth as usize) as i64;
                        idx /= bandwidth as usize;
                        digit - half
                    })
                    .collect()
            })
            .collect(),
        _ => {
            let mut seen = HashSet::with_capacity(k);
            let mut out = Vec::with_capacity(k);
            while out.len() < k {
                let w: Vec<i64> = (0..dim).map(|_| rng.gen_range(-half..half)).collect();
                if seen.insert(w.clone()) {
                    out.push(w);
                }
            }
            out
        }
    };

    for w in freqs {
        let theta: f64 = rng.gen();
        spectrum.insert(Mode::new(w, cis_turns(theta)))?;
    }
    Ok(spectrum)
}

/// Root-sum-square discrepancy between two spectra.
///
/// Modes are matched by exact frequency equality. Matched modes contribute
/// `|a_true - a_rec|^2`, unmatched modes on either side their full `|a|^2`.
pub fn l2_error(truth: &SparseSpectrum, recovered: &SparseSpectrum) -> f64 {
    let mut sum = 0.0;
    for (w, &a) in truth {
        sum += match recovered.get(w) {
            Some(b) => (a - b).norm_sqr(),
            None => a.norm_sqr(),
        };
    }
    for (w, &b) in recovered {
        if !truth.contains(w) {
            sum += b.norm_sqr();
        }
    }
    sum.sqrt()
}
