use std::fmt;

use hdsfft::{
    format, l2_error, multi_phaseshift, random_instance, Error, SignalOracle, SparseSpectrum,
};

use crate::{Result, Settings};

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub truth: SparseSpectrum,
    pub recovered: SparseSpectrum,
    pub partition: String,
    pub k: usize,
    pub samples: u64,
    pub ticks_ns: u64,
    pub iterations: usize,
    pub fallback_used: bool,
    pub l2_error: f64,
    /// Why the solve stopped short; `None` on full recovery.
    pub failure: Option<String>,
    /// Registry dump with diagnostics, present on partial recovery.
    pub diagnostics: Option<String>,
}

impl SolveOutcome {
    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for SolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension      {}", self.truth.dim())?;
        writeln!(f, "bandwidth      {}", self.truth.bandwidth())?;
        writeln!(f, "partition      {}", self.partition)?;
        writeln!(f, "sparsity       {} (true {})", self.k, self.truth.len())?;
        writeln!(f, "recovered      {}", self.recovered.len())?;
        writeln!(f, "samples        {}", self.samples)?;
        writeln!(f, "ticks_ns       {}", self.ticks_ns)?;
        writeln!(f, "iterations     {}", self.iterations)?;
        writeln!(f, "fallback_used  {}", self.fallback_used)?;
        writeln!(f, "l2_error       {:e}", self.l2_error)?;
        match &self.failure {
            None => writeln!(f, "status         ok"),
            Some(cause) => writeln!(f, "status         partial ({cause})"),
        }
    }
}

/// Loads `--input` or generates an instance from `--dims`, `--sparsity`
/// and `--seed`, then recovers it.
pub fn solve(s: &Settings) -> Result<SolveOutcome> {
    let (truth, s) = match &s.input {
        Some(path) => {
            let truth = format::load(path)?;
            let s = Settings {
                bandwidth: truth.bandwidth(),
                dims: vec![truth.dim()],
                ..s.clone()
            };
            (truth, s)
        }
        None => {
            let k = s
                .sparsity
                .as_ref()
                .and_then(|v| v.first().copied())
                .unwrap_or(1);
            (
                random_instance(s.dims[0], s.bandwidth, k, s.seed)?,
                s.clone(),
            )
        }
    };
    let k = s
        .sparsity
        .as_ref()
        .and_then(|v| v.first().copied())
        .unwrap_or(truth.len());
    let part = s.partition_for(truth.dim())?;
    let oracle = SignalOracle::from_spectrum(&truth);
    let mut out = SolveOutcome {
        recovered: SparseSpectrum::new(truth.dim(), truth.bandwidth())?,
        truth,
        partition: part.label(),
        k,
        samples: 0,
        ticks_ns: 0,
        iterations: 0,
        fallback_used: false,
        l2_error: 0.0,
        failure: None,
        diagnostics: None,
    };
    match multi_phaseshift(&oracle, &part, &s.solver_config(k, s.seed)) {
        Ok(r) => {
            out.samples = r.samples_used;
            out.ticks_ns = r.elapsed_ticks;
            out.iterations = r.iterations;
            out.fallback_used = r.fallback_used;
            out.recovered = r.recovered;
        }
        Err(Error::Partial(p)) => {
            out.samples = p.samples_used;
            out.iterations = p.iterations;
            out.fallback_used = p.fallback_used;
            out.failure = Some(p.cause.to_string());
            out.diagnostics = Some(p.diagnostics());
            out.recovered = p.registry;
        }
        Err(e) => return Err(e.into()),
    }
    out.l2_error = l2_error(&out.truth, &out.recovered);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_single_mode() {
        let s = Settings {
            dims: vec![4],
            sparsity: Some(vec![1]),
            seed: 3,
            ..Settings::default()
        };
        let out = solve(&s).unwrap();
        assert!(out.complete());
        assert!(out.recovered.frequencies().eq(out.truth.frequencies()));
        assert!(out.l2_error < 1e-12);
        assert!(out.to_string().contains("status         ok"));
    }

    #[test]
    fn underestimated_sparsity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("four.txt");
        format::save(&path, &random_instance(4, 20, 4, 8).unwrap()).unwrap();
        let s = Settings {
            input: Some(path),
            sparsity: Some(vec![2]),
            ..Settings::default()
        };
        let out = solve(&s).unwrap();
        assert!(!out.complete());
        assert!(out.recovered.len() <= 2);
        assert!(out.diagnostics.unwrap().contains("# cause"));
    }
}
