use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::spectrum::{check_bandwidth, FrequencyVector};
use crate::{Error, Result};

/// Largest admissible block bandwidth `N^{d_i}` (exclusive).
const MAX_BLOCK_BANDWIDTH: u64 = 1 << 52;

/// A decomposition `d = d_1 + ... + d_r` of the dimensions into blocks, each
/// unwrapped into one reduced axis of bandwidth `N^{d_i}`.
///
/// `order` lists original dimension indices; block `q` takes the `d_q`
/// entries of `order` starting at `sum_{i<q} d_i`, least significant digit
/// first. The identity order gives the natural contiguous blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    order: Vec<usize>,
    bandwidth: u64,
}

impl Partition {
    pub fn new(blocks: Vec<usize>, bandwidth: u64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut total = 0usize;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidPartition(
                    "block dimensions must be positive".into(),
                ));
            }
            match (bandwidth as u128).checked_pow(b as u32) {
                Some(bw) if bw < MAX_BLOCK_BANDWIDTH as u128 => {}
                _ => {
                    return Err(Error::InvalidPartition(format!(
                        "block bandwidth {bandwidth}^{b} exceeds 2^52 and cannot be decoded in double precision"
                    )))
                }
            }
            offsets.push(total);
            total += b;
        }
        Ok(Self {
            blocks,
            offsets,
            order: (0..total).collect(),
            bandwidth,
        })
    }

    /// `d / sub` blocks of `sub` dimensions each.
    pub fn uniform(dim: usize, sub: usize, bandwidth: u64) -> Result<Self> {
        if sub == 0 || dim % sub != 0 {
            return Err(Error::InvalidPartition(format!(
                "block size {sub} does not divide dimension {dim}; give an explicit partition instead"
            )));
        }
        Self::new(vec![sub; dim / sub], bandwidth)
    }

    /// Every dimension on its own axis (no unwrapping).
    pub fn trivial(dim: usize, bandwidth: u64) -> Result<Self> {
        Self::new(vec![1; dim], bandwidth)
    }

    /// Parses a comma-separated list of block dimensions such as `5,5,3`.
    pub fn parse(text: &str, bandwidth: u64) -> Result<Self> {
        let blocks = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("bad block size '{}'", s.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks, bandwidth)
    }

    /// Same blocks with the dimensions assigned in `order`.
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if order.len() != d {
            return Err(Error::InvalidPartition(format!(
                "order has {} entries, expected {d}",
                order.len()
            )));
        }
        for &i in &order {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPartition("order is not a permutation".into()));
            }
        }
        self.order = order;
        Ok(self)
    }

    /// Same blocks over a seeded random permutation of the dimensions.
    pub fn reshuffled(&self, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self {
            order,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn reduced_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn bandwidth(&self) -> u64 {
        self.bandwidth
    }

    /// `N^{d_q}`.
    pub fn block_bandwidth(&self, q: usize) -> u64 {
        self.bandwidth.pow(self.blocks[q] as u32)
    }

    /// `N^{max d_q}`.
    pub fn max_block_bandwidth(&self) -> u64 {
        (0..self.blocks.len())
            .map(|q| self.block_bandwidth(q))
            .max()
            .unwrap_or(1)
    }

    /// The shift `1 / (2 N^{max d_q})`, whose decoding window covers every
    /// unwrapped coordinate.
    pub fn default_epsilon(&self) -> f64 {
        0.5 / self.max_block_bandwidth() as f64
    }

    /// Inclusive range of the unwrapped coordinate `q`.
    pub fn image_bounds(&self, q: usize) -> (i64, i64) {
        let n = self.bandwidth as i64;
        let repunit = (self.block_bandwidth(q) as i64 - 1) / (n - 1);
        (-(n / 2) * repunit, (n / 2 - 1) * repunit)
    }

    /// Original dimension indices of block `q`, least significant first.
    pub fn block_members(&self, q: usize) -> &[usize] {
        &self.order[self.offsets[q]..self.offsets[q] + self.blocks[q]]
    }

    /// Compact label, e.g. `5x20` or `3x4+4x2`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.blocks.len() {
            let b = self.blocks[i];
            let run = self.blocks[i..].iter().take_while(|&&x| x == b).count();
            parts.push(format!("{b}x{run}"));
            i += run;
        }
        parts.join("+")
    }
}

/// Unwraps each block of `w` into one integer, `sum_r w[block_r] N^r`.
pub fn unwrap_freq(w: &FrequencyVector, part: &Partition) -> Result<Vec<i64>> {
    if w.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: part.dim(),
            actual: w.dim(),
        });
    }
    w.check_band(part.bandwidth)?;
    let n = part.bandwidth as i64;
    let comps = w.components();
    Ok((0..part.reduced_dim())
        .map(|q| {
            part.block_members(q)
                .iter()
                .rev()
                .fold(0i64, |acc, &i| acc * n + comps[i])
        })
        .collect())
}

/// Inverse of [`unwrap_freq`] by balanced-digit extraction.
pub fn wrap_freq(u: &[i64], part: &Partition) -> Result<FrequencyVector> {
    if u.len() != part.reduced_dim() {
        return Err(Error::DimensionMismatch {
            expected: part.reduced_dim(),
            actual: u.len(),
        });
    }
    let n = part.bandwidth as i64;
    let half = n / 2;
    let mut w = vec![0i64; part.dim()];
    for (q, &value) in u.iter().enumerate() {
        let (lo, hi) = part.image_bounds(q);
        if value < lo || value > hi {
            return Err(Error::OutOfBand {
                index: q,
                value,
                lo,
                hi,
            });
        }
        let mut rest = value;
        for &i in part.block_members(q) {
            let digit = (rest + half).rem_euclid(n) - half;
            w[i] = digit;
            rest = (rest - digit) / n;
        }
        debug_assert_eq!(rest, 0);
    }
    Ok(FrequencyVector::new(w))
}

/// Embeds a reduced time vector: entry `r` of block `q` becomes `N^r t[q]`.
pub fn unwrap_time(t_reduced: &[f64], part: &Partition) -> Result<Vec<f64>> {
    let mut full = vec![0.0; part.dim()];
    unwrap_time_into(t_reduced, part, &mut full)?;
    Ok(full)
}

pub(crate) fn unwrap_time_into(
    t_reduced: &[f64],
    part: &Partition,
    full: &mut [f64],
) -> Result<()> {
    if t_reduced.len() != part.reduced_dim() {
        return Err(Error::DimensionMismatch {
            expected: part.reduced_dim(),
            actual: t_reduced.len(),
        });
    }
    let n = part.bandwidth as f64;
    for (q, &tq) in t_reduced.iter().enumerate() {
        let mut scale = 1.0;
        for &i in part.block_members(q) {
            full[i] = scale * tq;
            scale *= n;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn fv(v: &[i64]) -> FrequencyVector {
        FrequencyVector::new(v.to_vec())
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![], 20).is_err());
        assert!(Partition::new(vec![2, 0], 20).is_err());
        assert!(Partition::new(vec![2], 7).is_err());
        assert!(Partition::new(vec![13], 20).is_err());
        assert!(Partition::new(vec![12], 20).is_ok());
        assert!(Partition::uniform(10, 3, 20).is_err());
        assert_eq!(Partition::uniform(100, 5, 20).unwrap().reduced_dim(), 20);
        assert_eq!(Partition::parse("3,3,4", 20).unwrap().blocks(), &[3, 3, 4]);
        assert!(Partition::parse("3,,4", 20).is_err());
        assert_eq!(
            Partition::parse("3,3,3,3,4,4", 20).unwrap().label(),
            "3x4+4x2"
        );
    }

    #[test]
    fn unwrap_examples() {
        let p = Partition::new(vec![2], 20).unwrap();
        assert_eq!(unwrap_freq(&fv(&[3, -5]), &p).unwrap(), vec![-97]);
        let p = Partition::new(vec![2, 2], 20).unwrap();
        assert_eq!(unwrap_freq(&fv(&[1, 2, 3, 4]), &p).unwrap(), vec![41, 83]);
        assert_eq!(unwrap_freq(&fv(&[0, 0, 0, 0]), &p).unwrap(), vec![0, 0]);
        assert!(unwrap_freq(&fv(&[10, 0, 0, 0]), &p).is_err());
    }

    #[test]
    fn wrap_examples() {
        let p = Partition::new(vec![2], 20).unwrap();
        assert_eq!(wrap_freq(&[-97], &p).unwrap(), fv(&[3, -5]));
        assert_eq!(wrap_freq(&[0], &p).unwrap(), fv(&[0, 0]));
        assert_eq!(p.image_bounds(0), (-210, 189));
        assert!(wrap_freq(&[190], &p).is_err());
        assert!(wrap_freq(&[-211], &p).is_err());
        assert_eq!(wrap_freq(&[-210], &p).unwrap(), fv(&[-10, -10]));
        assert_eq!(wrap_freq(&[189], &p).unwrap(), fv(&[9, 9]));
    }

    #[test]
    fn unwrap_time_examples() {
        let p = Partition::new(vec![2, 2], 20).unwrap();
        assert_eq!(unwrap_time(&[0.0, 0.0], &p).unwrap(), vec![0.0; 4]);
        assert_eq!(
            unwrap_time(&[0.25, 0.5], &p).unwrap(),
            vec![0.25, 5.0, 0.5, 10.0]
        );
    }

    #[test]
    fn exhaustive_bijection_small_box() {
        let p = Partition::new(vec![2, 2], 4).unwrap();
        let mut images = std::collections::HashSet::new();
        for idx in 0..256i64 {
            let w: Vec<i64> = (0..4).map(|j| (idx >> (2 * j)) % 4 - 2).collect();
            let u = unwrap_freq(&fv(&w), &p).unwrap();
            assert!(images.insert(u.clone()));
            assert_eq!(wrap_freq(&u, &p).unwrap().components(), &w[..]);
        }
        assert_eq!(images.len(), 256);
    }

    #[test]
    fn reshuffle_is_a_seeded_permutation() {
        let p = Partition::uniform(20, 5, 20).unwrap();
        let a = p.reshuffled(7);
        let b = p.reshuffled(7);
        assert_eq!(a, b);
        assert_eq!(a.blocks(), p.blocks());
        assert_ne!(a.order(), p.order());
        let mut sorted = a.order().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, p.order());
    }

    fn arb_vector(d: usize, n: i64) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-n / 2..n / 2, d)
    }

    proptest! {
        #[test]
        fn wrap_inverts_unwrap(w in arb_vector(25, 20), seed in any::<u64>()) {
            let p = Partition::uniform(25, 5, 20).unwrap().reshuffled(seed);
            let u = unwrap_freq(&fv(&w), &p).unwrap();
            for (q, &x) in u.iter().enumerate() {
                let (lo, hi) = p.image_bounds(q);
                prop_assert!(lo <= x && x <= hi);
                prop_assert!(x.unsigned_abs() < p.block_bandwidth(q));
            }
            prop_assert_eq!(wrap_freq(&u, &p).unwrap().into_inner(), w);
        }

        #[test]
        fn unwrap_duality(w in arb_vector(9, 20), t in proptest::collection::vec(-1.0f64..1.0, 3), seed in any::<u64>()) {
            let p = Partition::new(vec![2, 3, 4], 20).unwrap().reshuffled(seed);
            let fw = fv(&w);
            let u = unwrap_freq(&fw, &p).unwrap();
            let lhs: f64 = u.iter().zip(&t).map(|(&a, &b)| a as f64 * b).sum();
            let rhs = fw.dot(&unwrap_time(&t, &p).unwrap());
            // Unwrapped coordinates reach ~1.7e5 here, so compare relative to that scale.
            prop_assert!((lhs - rhs).abs() <= 1e-12 * u.iter().map(|x| x.abs() as f64).sum::<f64>().max(1.0));
        }
    }
}
