//! The three BFS-tree algorithms and their building blocks.

mod eb;
mod ee;
pub mod ep;
mod tree;
mod vbfs;

use std::path::PathBuf;
use std::time::{Duration, Instant};

pub use eb::{eb_bfs, im_bfs, ImBfs};
pub use ee::ee_bfs;
pub use ep::ep_bfs;
pub use tree::{BfsTree, TREE_HEADER_LEN, TREE_MAGIC};
pub use vbfs::{is_vbfs_edge, is_vbfs_in};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Ee,
    Eb,
    Ep,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ee => "ee",
            Algo::Eb => "eb",
            Algo::Ep => "ep",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ee" => Ok(Algo::Ee),
            "eb" => Ok(Algo::Eb),
            "ep" => Ok(Algo::Ep),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Memory factor: the sketch holds `(1+K)·n` edges.
    pub k: f64,
    /// Rebuild trigger for the partitioned algorithm's scan list.
    pub gamma: f64,
    /// Maximum outer passes; `None` means `max(n, 1)`.
    pub watchdog: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Where temporary files go; `None` uses the system default.
    pub scratch: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            k: 1.0,
            gamma: 0.08,
            watchdog: None,
            time_limit: None,
            scratch: None,
        }
    }
}

impl RunOptions {
    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub(crate) fn scratch_dir(&self, prefix: &str) -> Result<tempfile::TempDir> {
        let mut b = tempfile::Builder::new();
        b.prefix(prefix);
        Ok(match &self.scratch {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                b.tempdir_in(dir)?
            }
            None => b.tempdir()?,
        })
    }
}

/// Counters reported by every algorithm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Full passes over the graph (or over the scan list for `ep`).
    pub outer_iterations: u64,
    /// Passes that changed the tree.
    pub restructuring_passes: u64,
    /// Calls of the in-memory restructuring routine.
    pub imp_invocations: u64,
    pub peak_in_memory_edges: u64,
    pub edge_budget: u64,
    /// Named array sizes in bytes; `transient` ones are released before the
    /// main loop.
    pub memory: Vec<MemoryItem>,
    /// Algorithm-specific extras, in a stable order.
    pub extra: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryItem {
    pub name: String,
    pub bytes: u64,
    pub transient: bool,
}

impl RunStats {
    pub(crate) fn mem(&mut self, name: &str, bytes: u64, transient: bool) {
        self.memory.push(MemoryItem {
            name: name.to_string(),
            bytes,
            transient,
        });
    }

    pub fn extra(&self, key: &str) -> Option<u64> {
        self.extra.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tree: BfsTree,
    pub stats: RunStats,
}

/// Pass watchdog and wall-clock limit.
pub(crate) struct Guard {
    start: Instant,
    limit: Option<Duration>,
    max_passes: u64,
}

impl Guard {
    pub(crate) fn new(opts: &RunOptions, n: u64) -> Self {
        Guard {
            start: Instant::now(),
            limit: opts.time_limit,
            max_passes: opts.watchdog.unwrap_or(n.max(1)),
        }
    }

    pub(crate) fn pass(&self, passes: u64) -> Result<()> {
        if passes > self.max_passes {
            return Err(Error::Watchdog { passes: passes - 1 });
        }
        self.time()
    }

    pub(crate) fn time(&self) -> Result<()> {
        match self.limit {
            Some(l) if self.start.elapsed() > l => Err(Error::Timeout { seconds: l.as_secs() }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
    }
    Ok(())
}

/// Runs `algo` on `g`.
pub fn run(
    algo: Algo,
    g: &crate::graphio::GraphFile,
    opts: &RunOptions,
    meter: &crate::graphio::IoMeter,
) -> Result<RunOutput> {
    match algo {
        Algo::Ee => ee_bfs(g, opts, meter),
        Algo::Eb => eb_bfs(g, opts, meter),
        Algo::Ep => ep_bfs(g, opts, meter),
    }
}
