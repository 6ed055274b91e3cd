//! Coordinate frames a solve can run in.

use crate::dft::{block_weights, sample_embedded, sample_line, SampleLine};
use crate::maps::{tilt_freq, untilt_freq, unwrap_freq, wrap_freq, Partition, TiltParams};
use crate::oracle::Oracle;
use crate::spectrum::FrequencyVector;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Frame {
    /// Partially unwrapped coordinates.
    Blocks(Partition),
    /// A two-block partition followed by a tilt of the reduced plane.
    Tilted(Partition, TiltParams),
}

impl Frame {
    pub fn partition(&self) -> &Partition {
        match self {
            Frame::Blocks(p) | Frame::Tilted(p, _) => p,
        }
    }

    pub fn reduced_dim(&self) -> usize {
        match self {
            Frame::Blocks(p) => p.reduced_dim(),
            Frame::Tilted(..) => 2,
        }
    }

    /// Shift that keeps every frame coordinate inside the decoding window.
    pub fn natural_epsilon(&self) -> f64 {
        match self {
            Frame::Blocks(p) => p.default_epsilon(),
            Frame::Tilted(p, tp) => 0.5 / (tp.inflation() as f64 * p.max_block_bandwidth() as f64),
        }
    }

    pub fn to_frame(&self, w: &FrequencyVector) -> Result<Vec<i64>> {
        match self {
            Frame::Blocks(p) => unwrap_freq(w, p),
            Frame::Tilted(p, tp) => {
                let u = unwrap_freq(w, p)?;
                Ok(tilt_freq([u[0], u[1]], tp).to_vec())
            }
        }
    }

    pub fn to_full(&self, u: &[i64]) -> Result<FrequencyVector> {
        match self {
            Frame::Blocks(p) => wrap_freq(u, p),
            Frame::Tilted(p, tp) => {
                let back = untilt_freq([u[0], u[1]], tp)?;
                wrap_freq(&back, p)
            }
        }
    }

    pub fn sample<O: Oracle + ?Sized>(
        &self,
        oracle: &O,
        m: usize,
        n: Option<usize>,
        p: usize,
        eps: f64,
    ) -> Result<SampleLine> {
        match self {
            Frame::Blocks(part) => sample_line(oracle, part, m, n, p, eps),
            Frame::Tilted(part, tp) => {
                if oracle.dim() != part.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: part.dim(),
                        actual: oracle.dim(),
                    });
                }
                // Reduced block q sees `T[q][m] j / p + T[q][n] eps` where T
                // is the matrix of tilt_time.
                let (b, h) = (tp.base() as i128, tp.height() as i128);
                let t = [[b, h], [-h, b]];
                let bw = part.bandwidth() as i128;
                let mut line = Vec::new();
                let mut shift = Vec::new();
                for (q, row) in t.iter().enumerate() {
                    for (i, w) in block_weights(part, q, bw) {
                        line.push((i, row[m] * w));
                        if let Some(n) = n {
                            shift.push((i, (row[n] * w) as f64 * eps));
                        }
                    }
                }
                sample_embedded(oracle, &line, &shift, p, m, n, eps)
            }
        }
    }
}
