//! The `semibfs` command line.
//!
//! Exit codes: 0 success, 2 the tree failed validation, 3 watchdog or time
//! limit, 4 storage or file-format error, 1 anything else.

mod bench;
mod metrics;

pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow, Sweep};
pub use metrics::RunMetrics;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::algos::{run, Algo, BfsTree, RunOptions};
use crate::error::{Error, Result};
use crate::graphio::{generate_er, subsample, GraphFile, IoMeter};
use crate::oracle::validate_bfs_tree;

/// Scratch directory for partitions and intermediate edge lists.
pub const SCRATCH_ENV: &str = "SEMIBFS_SCRATCH";

#[derive(Debug, Parser)]
#[command(
    name = "semibfs",
    version,
    about = "BFS trees of disk-resident directed graphs in bounded memory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a uniform random simple digraph.
    Generate {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[arg(long, value_parser = parse_count)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep each edge of a graph independently with probability p.
    Subsample {
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a BFS tree.
    Run(RunArgs),
    /// Check a tree file against a graph.
    Verify { graph: PathBuf, tree: PathBuf },
    /// Run the sweeps of a TOML suite and print a CSV table.
    Bench {
        config: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub graph: PathBuf,
    #[arg(long, default_value = "ep")]
    pub algo: Algo,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.08)]
    pub gamma: f64,
    /// Maximum passes; defaults to the node count.
    #[arg(long)]
    pub watchdog: Option<u64>,
    /// Seconds.
    #[arg(long, default_value_t = 600)]
    pub time_limit: u64,
    /// Tree output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the metrics to this file.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    #[arg(long)]
    pub no_verify: bool,
}

/// Accepts plain integers and exact scientific notation such as `1e4`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(53) {
        Ok(f as u64)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

/// How a command ended when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Validation found this many violating edges.
    Invalid(u64),
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MalformedTree(_) => 2,
        Error::Watchdog { .. } | Error::Timeout { .. } => 3,
        Error::Io(_) | Error::Format { .. } => 4,
        _ => 1,
    }
}

fn scratch_from_env() -> Option<PathBuf> {
    std::env::var_os(SCRATCH_ENV)
        .filter(|s| !s.is_empty())
        .map(PathBuf::from)
}

fn report_violations(w: &mut dyn Write, v: &crate::oracle::Validation) -> Result<()> {
    writeln!(w, "valid={}", v.is_valid())?;
    writeln!(w, "violations={}", v.total)?;
    for (u, x) in v.violations.iter().take(10) {
        writeln!(w, "violation={u},{x}")?;
    }
    Ok(())
}

pub fn execute(cli: Cli, w: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Generate { n, m, seed, out } => {
            let meter = IoMeter::new();
            let g = generate_er(&out, n, m, seed, &meter)?;
            writeln!(w, "n={}\nm={}\nbytes_written={}", g.n(), g.m(), meter.bytes_written())?;
        }
        Command::Subsample { graph, p, seed, out } => {
            let meter = IoMeter::new();
            let g = GraphFile::open(&graph, &meter)?;
            let s = subsample(&g, p, seed, &out, &meter)?;
            writeln!(w, "n={}\nm={}\nm_input={}", s.n(), s.m(), g.m())?;
        }
        Command::Run(a) => return cmd_run(a, w),
        Command::Verify { graph, tree } => {
            let meter = IoMeter::new();
            let g = GraphFile::open(&graph, &meter)?;
            let t = BfsTree::read(&tree, &meter)?;
            let v = validate_bfs_tree(&g, &t, &meter)?;
            report_violations(w, &v)?;
            if !v.is_valid() {
                return Ok(Outcome::Invalid(v.total));
            }
        }
        Command::Bench { config, out } => {
            let cfg = BenchConfig::load(&config)?;
            let report = run_bench(&cfg, scratch_from_env())?;
            match out {
                Some(p) => std::fs::write(p, report.to_csv())?,
                None => w.write_all(report.to_csv().as_bytes())?,
            }
            let bad = report.invalid_runs();
            if bad > 0 {
                return Ok(Outcome::Invalid(bad as u64));
            }
        }
    }
    Ok(Outcome::Ok)
}

fn cmd_run(a: RunArgs, w: &mut dyn Write) -> Result<Outcome> {
    let meter = IoMeter::new();
    let g = GraphFile::open(&a.graph, &meter)?;
    let opts = RunOptions {
        k: a.k,
        gamma: a.gamma,
        watchdog: a.watchdog,
        time_limit: Some(Duration::from_secs(a.time_limit)),
        scratch: scratch_from_env(),
    };
    let start = Instant::now();
    let before = meter.snapshot();
    let out = run(a.algo, &g, &opts, &meter)?;
    let wall = start.elapsed();
    let metrics = RunMetrics::new(
        a.algo,
        g.n(),
        g.m(),
        &opts,
        &out.stats,
        meter.snapshot().since(before),
        wall,
    );
    if let Some(p) = &a.out {
        out.tree.write(p, &IoMeter::new())?;
    }
    let kv = metrics.to_kv();
    w.write_all(kv.as_bytes())?;
    if let Some(p) = &a.metrics {
        std::fs::write(p, &kv)?;
    }
    if !a.no_verify {
        let v = validate_bfs_tree(&g, &out.tree, &IoMeter::new())?;
        report_violations(w, &v)?;
        if !v.is_valid() {
            return Ok(Outcome::Invalid(v.total));
        }
    }
    Ok(Outcome::Ok)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Invalid(k)) => {
            eprintln!("semibfs: validation failed ({k} violations)");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("semibfs: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("10000").unwrap(), 10_000);
        assert_eq!(parse_count("1e4").unwrap(), 10_000);
        assert_eq!(parse_count("2E5").unwrap(), 200_000);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Watchdog { passes: 3 }), 3);
        assert_eq!(exit_code(&Error::Timeout { seconds: 1 }), 3);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 4);
        assert_eq!(exit_code(&Error::MalformedTree("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 1);
    }
}
