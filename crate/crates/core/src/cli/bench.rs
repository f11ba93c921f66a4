//! Parameter sweeps described by a TOML file.
//!
//! ```toml
//! seed = 1
//!
//! [[sweep]]
//! name = "degree"
//! algos = ["eb", "ep"]
//! n = [10000]
//! d = [1, 3, 5, 10]
//! k = [1.0]
//! ```
//!
//! Each sweep runs the cartesian product of `n` with either `d` (average
//! degree, `m = n·d`) or `m`, over every `k` and algorithm. Graphs are
//! generated once per `(n, m)` into scratch space.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Deserialize;

use super::RunMetrics;
use crate::algos::{run, Algo, RunOptions};
use crate::error::{Error, Result};
use crate::graphio::{generate_er, IoMeter};
use crate::oracle::validate_bfs_tree;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "yes")]
    pub verify: bool,
    /// Per-run limit in seconds.
    #[serde(default = "default_time_limit")]
    pub time_limit: u64,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub name: String,
    #[serde(default = "default_algos")]
    pub algos: Vec<String>,
    pub n: Vec<u64>,
    #[serde(default)]
    pub d: Option<Vec<f64>>,
    #[serde(default)]
    pub m: Option<Vec<u64>>,
    #[serde(default = "default_k")]
    pub k: Vec<f64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_seed() -> u64 {
    1
}
fn yes() -> bool {
    true
}
fn default_time_limit() -> u64 {
    600
}
fn default_algos() -> Vec<String> {
    vec!["eb".into(), "ep".into()]
}
fn default_k() -> Vec<f64> {
    vec![1.0]
}
fn default_gamma() -> f64 {
    0.08
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: BenchConfig =
            toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("bench config: {e}")))?;
        for s in &cfg.sweep {
            if s.d.is_some() == s.m.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "sweep {:?}: give exactly one of `d` and `m`",
                    s.name
                )));
            }
            for a in &s.algos {
                a.parse::<Algo>()?;
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub sweep: String,
    pub metrics: RunMetrics,
    /// `None` when verification is off.
    pub valid: Option<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn invalid_runs(&self) -> usize {
        self.rows.iter().filter(|r| r.valid == Some(false)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("sweep,{},valid\n", RunMetrics::CSV_HEADER);
        for r in &self.rows {
            let valid = match r.valid {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            };
            s.push_str(&format!("{},{},{valid}\n", r.sweep, r.metrics.csv_row()));
        }
        s
    }
}

/// Runs every sweep in order, one run at a time.
pub fn run_bench(cfg: &BenchConfig, scratch: Option<PathBuf>) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    if cfg.sweep.is_empty() {
        return Ok(report);
    }
    let opts_base = RunOptions {
        time_limit: Some(Duration::from_secs(cfg.time_limit)),
        scratch: scratch.clone(),
        ..RunOptions::default()
    };
    let dir = opts_base.scratch_dir("semibfs-bench-")?;
    for s in &cfg.sweep {
        let algos: Vec<Algo> = s.algos.iter().map(|a| a.parse()).collect::<Result<_>>()?;
        for &n in &s.n {
            let ms: Vec<u64> = match (&s.d, &s.m) {
                (Some(d), _) => d.iter().map(|&d| (n as f64 * d).round() as u64).collect(),
                (_, Some(m)) => m.clone(),
                _ => unreachable!(),
            };
            for m in ms {
                let path = dir.path().join(format!("er-{n}-{m}.bin"));
                let g = generate_er(&path, n, m, cfg.seed, &IoMeter::new())?;
                for &k in &s.k {
                    for &algo in &algos {
                        let opts = RunOptions {
                            k,
                            gamma: s.gamma,
                            ..opts_base.clone()
                        };
                        let meter = IoMeter::new();
                        let start = Instant::now();
                        let out = run(algo, &g, &opts, &meter)?;
                        let wall = start.elapsed();
                        let metrics = RunMetrics::new(algo, n, m, &opts, &out.stats, meter.snapshot(), wall);
                        let valid = if cfg.verify {
                            Some(
                                validate_bfs_tree(&g, &out.tree, &IoMeter::new())
                                    .map(|v| v.is_valid())
                                    .unwrap_or(false),
                            )
                        } else {
                            None
                        };
                        report.rows.push(BenchRow {
                            sweep: s.name.clone(),
                            metrics,
                            valid,
                        });
                    }
                }
                let _ = std::fs::remove_file(&path);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_gives_empty_report() {
        let cfg = BenchConfig::parse("").unwrap();
        let r = run_bench(&cfg, None).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.to_csv().lines().count(), 1);
    }

    #[test]
    fn sweep_needs_exactly_one_size_axis() {
        assert!(BenchConfig::parse("[[sweep]]\nname = \"x\"\nn = [10]\n").is_err());
        assert!(BenchConfig::parse("[[sweep]]\nname = \"x\"\nn = [10]\nd = [1.0]\nm = [5]\n").is_err());
        assert!(BenchConfig::parse("[[sweep]]\nname = \"x\"\nn = [10]\nd = [1.0]\nalgos = [\"dfs\"]\n").is_err());
    }

    #[test]
    fn k_sweep_verifies() {
        let cfg = BenchConfig::parse(
            "seed = 3\n[[sweep]]\nname = \"k\"\nalgos = [\"ee\", \"eb\", \"ep\"]\nn = [200]\nd = [3]\nk = [0.05, 0.5, 1, 2]\n",
        )
        .unwrap();
        let r = run_bench(&cfg, None).unwrap();
        assert_eq!(r.rows.len(), 12);
        assert_eq!(r.invalid_runs(), 0);
        assert!(r
            .rows
            .iter()
            .all(|x| x.metrics.peak_in_memory_edges <= x.metrics.edge_budget));
    }
}
