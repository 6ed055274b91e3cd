use std::io::Write;

use hdsfft::{l2_error, multi_phaseshift, random_instance, Error, SignalOracle};
use rayon::prelude::*;
use serde::Serialize;

use crate::{derive_seed, Result, Settings};

/// One solver run. Failed runs keep whatever the solver had found and name
/// the cause in `status`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: usize,
    pub partition: String,
    pub trial: usize,
    pub seed: u64,
    pub status: String,
    pub exact_support: bool,
    pub l2_error: f64,
    pub samples: u64,
    pub ticks_ns: u64,
    pub iterations: usize,
    pub fallback_used: bool,
}

impl BenchRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn trial(s: &Settings, d: usize, k: usize, trial: usize) -> Result<BenchRow> {
    let part = s.partition_for(d)?;
    let seed = derive_seed(s.seed, &[d as u64, k as u64, trial as u64]);
    let truth = random_instance(d, s.bandwidth, k, seed)?;
    let oracle = SignalOracle::from_spectrum(&truth);
    let mut row = BenchRow {
        d,
        n: s.bandwidth,
        k,
        partition: part.label(),
        trial,
        seed,
        status: "ok".into(),
        exact_support: false,
        l2_error: f64::NAN,
        samples: 0,
        ticks_ns: 0,
        iterations: 0,
        fallback_used: false,
    };
    let found = match multi_phaseshift(&oracle, &part, &s.solver_config(k, seed)) {
        Ok(report) => {
            row.samples = report.samples_used;
            row.ticks_ns = report.elapsed_ticks;
            row.iterations = report.iterations;
            row.fallback_used = report.fallback_used;
            report.recovered
        }
        Err(Error::Partial(p)) => {
            row.status = format!("partial: {}", p.cause);
            row.samples = p.samples_used;
            row.iterations = p.iterations;
            row.fallback_used = p.fallback_used;
            p.registry
        }
        Err(e) => {
            row.status = format!("error: {e}");
            return Ok(row);
        }
    };
    row.exact_support = found.frequencies().eq(truth.frequencies());
    row.l2_error = l2_error(&truth, &found);
    Ok(row)
}

/// Runs `trials` seeded instances for every `(d, k)` pair of the sweep.
/// Rows come back ordered by `(d, k, trial)` whatever the scheduling.
pub fn run_bench(s: &Settings) -> Result<Vec<BenchRow>> {
    let ks = s.bench_sparsities();
    for &d in &s.dims {
        s.partition_for(d)?;
    }
    let jobs: Vec<(usize, usize, usize)> = s
        .dims
        .iter()
        .flat_map(|&d| {
            ks.iter()
                .flat_map(move |&k| (0..s.trials).map(move |t| (d, k, t)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(d, k, t)| trial(s, d, k, t))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchSummary {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub k: usize,
    pub partition: String,
    pub trials: usize,
    pub failures: usize,
    pub max_l2_error: f64,
    pub mean_l2_error: f64,
    pub mean_samples: f64,
    pub geomean_samples: f64,
    pub mean_ticks_ns: f64,
    pub geomean_ticks_ns: f64,
    pub mean_iterations: f64,
}

fn geomean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x.max(1.0).ln(), n + 1));
    if n == 0 {
        f64::NAN
    } else {
        (sum / n as f64).exp()
    }
}

/// Per-configuration aggregates, in the order the configurations first
/// appear in `rows`.
pub fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut out: Vec<BenchSummary> = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let head = &rows[start];
        let end = start
            + rows[start..]
                .iter()
                .take_while(|r| (r.d, r.k, &r.partition) == (head.d, head.k, &head.partition))
                .count();
        let group = &rows[start..end];
        let n = group.len() as f64;
        let mean = |f: &dyn Fn(&BenchRow) -> f64| group.iter().map(f).sum::<f64>() / n;
        out.push(BenchSummary {
            d: head.d,
            n: head.n,
            k: head.k,
            partition: head.partition.clone(),
            trials: group.len(),
            failures: group.iter().filter(|r| !r.ok() || !r.exact_support).count(),
            max_l2_error: group.iter().map(|r| r.l2_error).fold(0.0, f64::max),
            mean_l2_error: mean(&|r| r.l2_error),
            mean_samples: mean(&|r| r.samples as f64),
            geomean_samples: geomean(group.iter().map(|r| r.samples as f64)),
            mean_ticks_ns: mean(&|r| r.ticks_ns as f64),
            geomean_ticks_ns: geomean(group.iter().map(|r| r.ticks_ns as f64)),
            mean_iterations: mean(&|r| r.iterations as f64),
        });
        start = end;
    }
    out
}

pub fn write_csv<T: Serialize, W: Write>(records: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `log2 y` against `log2 x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log2(), y.log2())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings {
            dims: vec![10],
            sparsity: Some(vec![1, 3]),
            trials: 3,
            ..Settings::default()
        }
    }

    #[test]
    fn rows_are_ordered_and_exact() {
        let rows = run_bench(&settings()).unwrap();
        assert_eq!(rows.len(), 6);
        let keys: Vec<_> = rows.iter().map(|r| (r.k, r.trial)).collect();
        assert_eq!(keys, vec![(1, 0), (1, 1), (1, 2), (3, 0), (3, 1), (3, 2)]);
        assert!(rows
            .iter()
            .all(|r| r.ok() && r.exact_support && r.l2_error < 1e-9));
        assert!(rows.iter().all(|r| r.partition == "5x2"));
    }

    #[test]
    fn summary_groups() {
        let rows = run_bench(&settings()).unwrap();
        let sum = summarize(&rows);
        assert_eq!(sum.len(), 2);
        assert_eq!(sum[0].trials, 3);
        assert_eq!(sum[1].failures, 0);
        assert!(sum[1].mean_samples >= sum[0].mean_samples);
        assert!(sum[0].geomean_samples <= sum[0].mean_samples + 1e-9);
    }

    #[test]
    fn failures_become_rows() {
        let s = Settings {
            max_iterations: 1,
            sparsity: Some(vec![100]),
            trials: 2,
            dims: vec![4],
            ..Settings::default()
        };
        let rows = run_bench(&s).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.status.starts_with("partial")));
        assert!(summarize(&rows)[0].failures == 2);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|e| (2f64.powi(e), 3.0 * 2f64.powi(e).powf(1.25)))
            .collect();
        assert!((log_log_slope(&pts) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let rows = run_bench(&Settings {
            trials: 1,
            sparsity: Some(vec![2]),
            dims: vec![5],
            ..Settings::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "d,N,k,partition,trial,seed,status,exact_support,l2_error,samples,ticks_ns,iterations,fallback_used\n"
        ));
        assert_eq!(text.lines().count(), 2);
    }
}
