use std::fmt::Write as _;
use std::time::Duration;

use crate::algos::{Algo, MemoryItem, RunOptions, RunStats};
use crate::graphio::IoSnapshot;

/// Everything reported about one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub algo: Algo,
    pub n: u64,
    pub m: u64,
    pub k: f64,
    pub gamma: f64,
    pub wall_time: Duration,
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub peak_in_memory_edges: u64,
    pub edge_budget: u64,
    pub outer_iterations: u64,
    pub restructuring_passes: u64,
    pub imp_invocations: u64,
    pub memory: Vec<MemoryItem>,
    pub extra: Vec<(String, u64)>,
}

impl RunMetrics {
    pub fn new(
        algo: Algo,
        n: u64,
        m: u64,
        opts: &RunOptions,
        stats: &RunStats,
        io: IoSnapshot,
        wall_time: Duration,
    ) -> Self {
        RunMetrics {
            algo,
            n,
            m,
            k: opts.k,
            gamma: opts.gamma,
            wall_time,
            bytes_read: io.bytes_read,
            bytes_written: io.bytes_written,
            peak_in_memory_edges: stats.peak_in_memory_edges,
            edge_budget: stats.edge_budget,
            outer_iterations: stats.outer_iterations,
            restructuring_passes: stats.restructuring_passes,
            imp_invocations: stats.imp_invocations,
            memory: stats.memory.clone(),
            extra: stats.extra.clone(),
        }
    }

    /// Bytes read plus bytes written.
    pub fn dt(&self) -> u64 {
        self.bytes_read + self.bytes_written
    }

    /// Bytes held for the whole run (transient setup arrays excluded).
    pub fn resident_bytes(&self) -> u64 {
        self.memory.iter().filter(|m| !m.transient).map(|m| m.bytes).sum()
    }

    /// One `key=value` per line.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(s, "{k}={v}").unwrap();
        kv("algo", &self.algo.name());
        kv("n", &self.n);
        kv("m", &self.m);
        kv("k", &self.k);
        if self.algo == Algo::Ep {
            kv("gamma", &self.gamma);
        }
        kv("wall_time_s", &format_args!("{:.6}", self.wall_time.as_secs_f64()));
        kv("bytes_read", &self.bytes_read);
        kv("bytes_written", &self.bytes_written);
        kv("dt_bytes", &self.dt());
        kv("peak_in_memory_edges", &self.peak_in_memory_edges);
        kv("edge_budget", &self.edge_budget);
        kv("outer_iterations", &self.outer_iterations);
        kv("restructuring_passes", &self.restructuring_passes);
        kv("imp_invocations", &self.imp_invocations);
        for item in &self.memory {
            let group = if item.transient { "mem_setup" } else { "mem" };
            kv(&format!("{group}.{}", item.name), &item.bytes);
        }
        kv("mem_resident_total", &self.resident_bytes());
        for (key, v) in &self.extra {
            kv(&format!("{}.{key}", self.algo.name()), v);
        }
        s
    }

    pub const CSV_HEADER: &'static str = "algo,n,m,k,wall_time_s,bytes_read,bytes_written,dt_bytes,peak_in_memory_edges,edge_budget,outer_iterations,restructuring_passes,imp_invocations,mem_resident_total";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{},{},{},{},{},{},{},{}",
            self.algo.name(),
            self.n,
            self.m,
            self.k,
            self.wall_time.as_secs_f64(),
            self.bytes_read,
            self.bytes_written,
            self.dt(),
            self.peak_in_memory_edges,
            self.edge_budget,
            self.outer_iterations,
            self.restructuring_passes,
            self.imp_invocations,
            self.resident_bytes()
        )
    }
}
