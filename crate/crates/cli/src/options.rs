use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use hdsfft::{FallbackPolicy, Partition, SolverConfig};

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Solve,
    Bench,
    Worstcase,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Sparse Fourier recovery of high-dimensional signals.
///
/// Every option except `--config` may also be given in the config file as
/// `key = value` (keys are the long flag names). Flags win over the file.
#[derive(Clone, Debug, Default, Parser)]
#[command(name = "hdsfft", version)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Option<Command>,
    /// Dimensions; a comma-separated list sweeps them in bench and worstcase.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub bandwidth: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub sparsity: Option<Vec<usize>>,
    /// Explicit block sizes, e.g. `5,5,5`.
    #[arg(long, conflicts_with = "subdim")]
    pub partition: Option<String>,
    /// Uniform block size.
    #[arg(long)]
    pub subdim: Option<usize>,
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Monte-Carlo trials per worstcase row.
    #[arg(long)]
    pub mc_trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub fallback: Option<FallbackPolicy>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Spectrum file to solve instead of a generated instance.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Sweep k up to 2^10 instead of 2^6.
    #[arg(long)]
    pub full_sweep: bool,
    #[arg(long)]
    pub demo_tilt: bool,
}

/// Options after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub mode: Command,
    pub dims: Vec<usize>,
    pub bandwidth: u64,
    pub sparsity: Option<Vec<usize>>,
    pub partition: Option<String>,
    pub subdim: Option<usize>,
    pub c: usize,
    pub epsilon: Option<f64>,
    pub tolerance: f64,
    pub trials: usize,
    pub mc_trials: u64,
    pub seed: u64,
    pub max_iterations: usize,
    pub fallback: FallbackPolicy,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub threads: Option<usize>,
    pub full_sweep: bool,
    pub demo_tilt: bool,
}

impl Default for Settings {
    fn default() -> Self {
        let cfg = SolverConfig::new(1, 20);
        Self {
            mode: Command::Solve,
            dims: vec![100],
            bandwidth: 20,
            sparsity: None,
            partition: None,
            subdim: None,
            c: cfg.c,
            epsilon: None,
            tolerance: cfg.tolerance,
            trials: 20,
            mc_trials: 1000,
            seed: 0,
            max_iterations: cfg.max_iterations,
            fallback: cfg.fallback,
            out: None,
            input: None,
            threads: None,
            full_sweep: false,
            demo_tilt: false,
        }
    }
}

const KEYS: &[&str] = &[
    "mode",
    "dims",
    "bandwidth",
    "sparsity",
    "partition",
    "subdim",
    "c",
    "epsilon",
    "tolerance",
    "trials",
    "mc-trials",
    "seed",
    "max-iterations",
    "fallback",
    "out",
    "input",
    "threads",
    "full-sweep",
    "demo-tilt",
];

/// Reads `key = value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", no + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{key}`",
                no + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &HashMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Usage(format!("config `{key}`: {e}")))
        })
        .transpose()
}

fn list_from_file(file: &HashMap<String, String>, key: &str) -> Result<Option<Vec<usize>>> {
    file.get(key)
        .map(|v| {
            v.split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|e| CliError::Usage(format!("config `{key}`: {e}")))
                })
                .collect()
        })
        .transpose()
}

impl Cli {
    pub fn resolve(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => parse_config(&fs::read_to_string(path)?)?,
            None => HashMap::new(),
        };
        self.resolve_with(&file)
    }

    pub fn resolve_with(&self, file: &HashMap<String, String>) -> Result<Settings> {
        let d = Settings::default();
        macro_rules! pick {
            ($flag:expr, $key:expr, $default:expr) => {
                match $flag.clone() {
                    Some(v) => v,
                    None => from_file(file, $key)?.unwrap_or($default),
                }
            };
        }
        macro_rules! pick_opt {
            ($flag:expr, $key:expr) => {
                match $flag.clone() {
                    Some(v) => Some(v),
                    None => from_file(file, $key)?,
                }
            };
        }
        let s = Settings {
            mode: pick!(self.mode, "mode", d.mode),
            dims: match &self.dims {
                Some(v) => v.clone(),
                None => list_from_file(file, "dims")?.unwrap_or(d.dims),
            },
            bandwidth: pick!(self.bandwidth, "bandwidth", d.bandwidth),
            sparsity: match &self.sparsity {
                Some(v) => Some(v.clone()),
                None => list_from_file(file, "sparsity")?,
            },
            partition: pick_opt!(self.partition, "partition"),
            subdim: pick_opt!(self.subdim, "subdim"),
            c: pick!(self.c, "c", d.c),
            epsilon: pick_opt!(self.epsilon, "epsilon"),
            tolerance: pick!(self.tolerance, "tolerance", d.tolerance),
            trials: pick!(self.trials, "trials", d.trials),
            mc_trials: pick!(self.mc_trials, "mc-trials", d.mc_trials),
            seed: pick!(self.seed, "seed", d.seed),
            max_iterations: pick!(self.max_iterations, "max-iterations", d.max_iterations),
            fallback: pick!(self.fallback, "fallback", d.fallback),
            out: pick_opt!(self.out, "out"),
            input: pick_opt!(self.input, "input"),
            threads: pick_opt!(self.threads, "threads"),
            full_sweep: self.full_sweep || from_file(file, "full-sweep")?.unwrap_or(false),
            demo_tilt: self.demo_tilt || from_file(file, "demo-tilt")?.unwrap_or(false),
        };
        if s.partition.is_some() && s.subdim.is_some() {
            return Err(CliError::Usage(
                "give either a partition or a subdim, not both".into(),
            ));
        }
        if s.dims.is_empty() || s.dims.contains(&0) {
            return Err(CliError::Usage("dims must be positive".into()));
        }
        if s.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        Ok(s)
    }
}

impl Settings {
    /// `1, 2, 4, ..` up to `2^max_exp`.
    fn powers(max_exp: u32) -> Vec<usize> {
        (0..=max_exp).map(|e| 1 << e).collect()
    }

    pub fn bench_sparsities(&self) -> Vec<usize> {
        self.sparsity
            .clone()
            .unwrap_or_else(|| Self::powers(if self.full_sweep { 10 } else { 6 }))
    }

    pub fn worstcase_sparsities(&self) -> Vec<usize> {
        self.sparsity.clone().unwrap_or_else(|| Self::powers(10))
    }

    /// Partition used for dimension `d`: the explicit block list, the
    /// uniform `subdim` split, or blocks of the largest divisor of `d` not
    /// above 5.
    pub fn partition_for(&self, d: usize) -> Result<Partition> {
        let part = match (&self.partition, self.subdim) {
            (Some(text), _) => Partition::parse(text, self.bandwidth)?,
            (None, Some(sub)) => Partition::uniform(d, sub, self.bandwidth)?,
            (None, None) => {
                let sub = (1..=d.min(5)).rev().find(|s| d % s == 0).unwrap_or(1);
                Partition::uniform(d, sub, self.bandwidth)?
            }
        };
        if part.dim() != d {
            return Err(CliError::Usage(format!(
                "partition covers {} dimensions, not {d}",
                part.dim()
            )));
        }
        Ok(part)
    }

    pub fn solver_config(&self, k: usize, seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig::new(k, self.bandwidth);
        cfg.c = self.c;
        cfg.epsilon = self.epsilon;
        cfg.tolerance = self.tolerance;
        cfg.max_iterations = self.max_iterations;
        cfg.fallback = self.fallback;
        cfg.seed = seed;
        cfg
    }

    /// `<out>.<suffix>`, or `hdsfft.<suffix>` without an output file.
    pub fn sidecar(&self, suffix: &str) -> PathBuf {
        let base = self.out.as_deref().unwrap_or(Path::new("hdsfft"));
        let mut name = base.as_os_str().to_owned();
        name.push(".");
        name.push(suffix);
        PathBuf::from(name)
    }
}
