//! Prime-length sample lines, their discrete Fourier transforms, and the
//! per-bin collision test and phase-shift decoding.
//!
//! A line samples the (reduced) signal at `t = (h/p) e_m + eps e_n` for
//! `h = 0..p`. Its unnormalized DFT puts `p * sum a_j exp(2 pi i eps u_jn)`
//! into bin `u_jm mod p`: every mode whose `m`-th coordinate falls in the
//! same residue class lands in the same bin.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::maps::Partition;
use crate::oracle::Oracle;
use crate::primes::is_prime;
use crate::{Error, Result};

/// Samples of one projection line.
#[derive(Clone, Debug)]
pub struct SampleLine {
    pub values: Vec<Complex64>,
    pub p: usize,
    /// Projection axis `m` in reduced coordinates.
    pub axis: usize,
    /// Reduced axis carrying the `eps` shift; `None` for the unshifted line.
    pub shift_axis: Option<usize>,
    pub epsilon: f64,
}

/// DFT of a sample line with bins ordered by decreasing magnitude.
#[derive(Clone, Debug)]
pub struct BinSpectrum {
    pub bins: Vec<Complex64>,
    /// Bin indices sorted by decreasing `|bins[h]|`, ties by index.
    pub permutation: Vec<usize>,
}

impl BinSpectrum {
    pub fn new(bins: Vec<Complex64>) -> Self {
        let mut s = Self {
            bins,
            permutation: Vec::new(),
        };
        s.resort();
        s
    }

    pub fn p(&self) -> usize {
        self.bins.len()
    }

    pub fn resort(&mut self) {
        let mags: Vec<f64> = self.bins.iter().map(|b| b.norm()).collect();
        let mut perm: Vec<usize> = (0..self.bins.len()).collect();
        perm.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
        self.permutation = perm;
    }

    /// `sum_h |bins[h]|^2 / p`, which equals `sum_n |values[n]|^2`.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum::<f64>() / self.p() as f64
    }

    pub fn max_magnitude(&self) -> f64 {
        self.permutation
            .first()
            .map_or(0.0, |&h| self.bins[h].norm())
    }
}

fn check_line_params(r: usize, m: usize, n: Option<usize>, p: usize, eps: f64) -> Result<()> {
    if m >= r || n.is_some_and(|n| n >= r) {
        return Err(Error::InvalidConfig(format!(
            "axis out of range for {r} reduced dimensions"
        )));
    }
    if !is_prime(p as u64) {
        return Err(Error::InvalidConfig(format!(
            "line length {p} is not prime"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "shift {eps} must be positive and finite"
        )));
    }
    Ok(())
}

fn collect_line<F>(
    r: usize,
    m: usize,
    n: Option<usize>,
    p: usize,
    eps: f64,
    mut eval: F,
) -> Result<SampleLine>
where
    F: FnMut(&[f64]) -> Result<Complex64>,
{
    check_line_params(r, m, n, p, eps)?;
    let mut t = vec![0.0; r];
    let mut values = Vec::with_capacity(p);
    for h in 0..p {
        t[m] = h as f64 / p as f64;
        if let Some(n) = n {
            t[n] += eps;
        }
        values.push(eval(&t)?);
        t[m] = 0.0;
        if let Some(n) = n {
            t[n] = 0.0;
        }
    }
    Ok(SampleLine {
        values,
        p,
        axis: m,
        shift_axis: n,
        epsilon: eps,
    })
}

/// Samples `oracle` on the line `(h/p) e_m + eps e_n` of the reduced space
/// of `part`, mapped back to full coordinates with [`unwrap_time`].
///
/// [`unwrap_time`]: crate::unwrap_time
pub fn sample_line<O: Oracle + ?Sized>(
    oracle: &O,
    part: &Partition,
    m: usize,
    n: Option<usize>,
    p: usize,
    eps: f64,
) -> Result<SampleLine> {
    if oracle.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: part.dim(),
            actual: oracle.dim(),
        });
    }
    if eps * part.max_block_bandwidth() as f64 > 1.0 {
        return Err(Error::InvalidConfig(format!(
            "shift {eps} exceeds 1/{} and cannot resolve the unwrapped band",
            part.max_block_bandwidth()
        )));
    }
    check_line_params(part.reduced_dim(), m, n, p, eps)?;
    let bw = part.bandwidth() as i128;
    let line: Vec<(usize, i128)> = block_weights(part, m, bw).collect();
    let shift: Vec<(usize, f64)> = match n {
        Some(n) => block_weights(part, n, bw)
            .map(|(i, w)| (i, w as f64 * eps))
            .collect(),
        None => Vec::new(),
    };
    sample_embedded(oracle, &line, &shift, p, m, n, eps)
}

/// `(i, N^r)` for the `r`-th member `i` of block `q`.
pub(crate) fn block_weights(
    part: &Partition,
    q: usize,
    bw: i128,
) -> impl Iterator<Item = (usize, i128)> + '_ {
    part.block_members(q).iter().scan(1i128, move |w, &i| {
        let out = (i, *w);
        *w *= bw;
        Some(out)
    })
}

/// Samples the points `x_j` with `x_j[i] = w_i j / p + s_i` for the integer
/// weights `line` and real offsets `shift`, every other coordinate zero.
///
/// Oracles are 1-periodic in every coordinate, so each coordinate is
/// reduced mod 1, the integer part exactly. This keeps the phase accurate
/// when the embedded times are large.
pub(crate) fn sample_embedded<O: Oracle + ?Sized>(
    oracle: &O,
    line: &[(usize, i128)],
    shift: &[(usize, f64)],
    p: usize,
    m: usize,
    n: Option<usize>,
    eps: f64,
) -> Result<SampleLine> {
    let pw = p as i128;
    let line: Vec<(usize, i128)> = line.iter().map(|&(i, w)| (i, w.rem_euclid(pw))).collect();
    let mut full = vec![0.0; oracle.dim()];
    let mut values = Vec::with_capacity(p);
    for j in 0..pw {
        for &(i, _) in line.iter() {
            full[i] = 0.0;
        }
        for &(i, _) in shift {
            full[i] = 0.0;
        }
        for &(i, w) in &line {
            full[i] += ((w * j) % pw) as f64 / p as f64;
        }
        for &(i, s) in shift {
            full[i] = (full[i] + s).rem_euclid(1.0);
        }
        values.push(oracle.evaluate(&full)?);
    }
    Ok(SampleLine {
        values,
        p,
        axis: m,
        shift_axis: n,
        epsilon: eps,
    })
}

/// Samples an oracle that already lives in reduced coordinates.
pub fn sample_reduced_line<O: Oracle + ?Sized>(
    oracle: &O,
    m: usize,
    n: Option<usize>,
    p: usize,
    eps: f64,
) -> Result<SampleLine> {
    collect_line(oracle.dim(), m, n, p, eps, |t| oracle.evaluate(t))
}

/// Forward DFT `bins[h] = sum_n values[n] exp(-2 pi i h n / p)`, computed
/// with cached FFT plans (Rader/Bluestein for prime lengths).
pub struct DftEngine {
    planner: FftPlanner<f64>,
}

impl Default for DftEngine {
    fn default() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }
}

impl DftEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn transform(&mut self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        if !buf.is_empty() {
            self.planner.plan_fft_forward(buf.len()).process(&mut buf);
        }
        buf
    }

    pub fn dft(&mut self, line: &SampleLine) -> BinSpectrum {
        BinSpectrum::new(self.transform(&line.values))
    }
}

impl std::fmt::Debug for DftEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("DftEngine")
    }
}

pub fn dft(line: &SampleLine) -> BinSpectrum {
    DftEngine::new().dft(line)
}

/// Reference `O(p^2)` transform with exact integer reduction of `h n mod p`.
pub fn dft_direct(values: &[Complex64]) -> Vec<Complex64> {
    let p = values.len();
    let roots: Vec<Complex64> = (0..p)
        .map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / p as f64))
        .collect();
    (0..p)
        .map(|h| {
            values
                .iter()
                .enumerate()
                .map(|(n, v)| v * roots[(h * n) % p])
                .sum()
        })
        .collect()
}

/// `true` when bin `h` looks like a single mode: the shifted and unshifted
/// magnitudes agree to within relative `tol`.
pub fn collision_test(
    unshifted: &BinSpectrum,
    shifted: &BinSpectrum,
    h: usize,
    tol: f64,
    floor: f64,
) -> Result<bool> {
    let u = unshifted.bins[h].norm();
    if u.is_nan() || u <= floor {
        return Err(Error::EmptyBin { bin: h });
    }
    Ok((shifted.bins[h].norm() / u - 1.0).abs() < tol)
}

/// `Arg(shifted[h] / unshifted[h]) / (2 pi eps)`, in `[-1/(2eps), 1/(2eps))`.
pub fn decode_frequency(
    unshifted: &BinSpectrum,
    shifted: &BinSpectrum,
    h: usize,
    eps: f64,
) -> Result<f64> {
    let u = unshifted.bins[h];
    if u.norm() == 0.0 {
        return Err(Error::EmptyBin { bin: h });
    }
    let ratio = shifted.bins[h] / u;
    if !ratio.re.is_finite() || !ratio.im.is_finite() {
        return Err(Error::EmptyBin { bin: h });
    }
    let mut arg = ratio.arg();
    if arg >= PI {
        arg -= TAU;
    }
    Ok(arg / (TAU * eps))
}

pub fn decode_coefficient(unshifted: &BinSpectrum, h: usize, p: usize) -> Complex64 {
    unshifted.bins[h] / p as f64
}
