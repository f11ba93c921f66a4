//! ScanG: split the edge list into memory-sized runs, each sorted by source,
//! and read them back source by source with a k-way merge.

use std::path::Path;

use super::check_node_count;
use super::degrees::DegreeTable;
use super::format::{EdgeReader, EdgeWriter, GraphFile, IdWidth};
use super::meter::IoMeter;
use crate::error::{Error, Result};

/// Number of edges the sketch may hold: `(1+K)·n`, rounded down.
pub fn edge_capacity(n: u64, k: f64) -> u64 {
    // the epsilon keeps e.g. 1.05 * 100 from landing on 104.999...
    ((1.0 + k) * n as f64 + 1e-9).floor() as u64
}

pub fn partition_count(m: u64, capacity: u64) -> u64 {
    if m == 0 {
        0
    } else {
        m.div_ceil(capacity.max(1))
    }
}

#[derive(Debug, Clone)]
pub struct Partition {
    pub index: usize,
    pub file: GraphFile,
}

#[derive(Debug)]
pub struct ScanOutput {
    pub partitions: Vec<Partition>,
    pub degrees: DegreeTable,
    /// Transient bytes used by the in-memory sort of one partition.
    pub sort_buffer_bytes: u64,
}

/// Splits `g` into `⌈m / ((1+K)·n)⌉` consecutive runs. Each run is counting
/// sorted by source (stable, so a source's edges keep their file order) and
/// written to `dir`. Degrees are accumulated in the same pass.
///
/// `budget` is the number of edges that may be held in memory for the sort.
pub fn scan_g(g: &GraphFile, k: f64, budget: u64, dir: &Path, meter: &IoMeter) -> Result<ScanOutput> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "K must be a non-negative number, got {k}"
        )));
    }
    let n = check_node_count(g.n())?;
    let capacity = edge_capacity(g.n(), k);
    if budget < capacity {
        return Err(Error::BudgetTooSmall {
            budget,
            needed: capacity,
        });
    }
    let mut degrees = DegreeTable::new(n);
    let mut partitions = Vec::new();
    if g.m() == 0 {
        return Ok(ScanOutput {
            partitions,
            degrees,
            sort_buffer_bytes: 0,
        });
    }
    let chunk = capacity.min(g.m()) as usize;
    let mut src = Vec::with_capacity(chunk);
    let mut dst = Vec::with_capacity(chunk);
    let mut sorted = vec![(0u32, 0u32); chunk];
    let mut counts = vec![0u32; n + 1];
    let mut reader = g.edges(meter)?;
    loop {
        src.clear();
        dst.clear();
        while src.len() < chunk {
            match reader.next_edge()? {
                Some((u, v)) => {
                    degrees.record(u as usize, v as usize)?;
                    src.push(u as u32);
                    dst.push(v as u32);
                }
                None => break,
            }
        }
        if src.is_empty() {
            break;
        }
        counts.fill(0);
        for &u in &src {
            counts[u as usize + 1] += 1;
        }
        for i in 1..=n {
            counts[i] += counts[i - 1];
        }
        for (&u, &v) in src.iter().zip(&dst) {
            let slot = &mut counts[u as usize];
            sorted[*slot as usize] = (u, v);
            *slot += 1;
        }
        let index = partitions.len();
        let mut w = EdgeWriter::create(dir.join(format!("part-{index:05}.bin")), g.n(), IdWidth::U32, meter)?;
        for &(u, v) in &sorted[..src.len()] {
            w.push(u64::from(u), u64::from(v))?;
        }
        partitions.push(Partition {
            index,
            file: w.finish()?,
        });
    }
    // src + dst + sorted copy + counts
    let sort_buffer_bytes = (16 * chunk + 4 * (n + 1)) as u64;
    Ok(ScanOutput {
        partitions,
        degrees,
        sort_buffer_bytes,
    })
}

struct Cursor {
    reader: EdgeReader,
    head: Option<(u32, u32)>,
}

impl Cursor {
    fn advance(&mut self) -> Result<()> {
        self.head = self.reader.next_pair()?;
        Ok(())
    }
}

/// Emits every source `u = 0, 1, …, n-1` in order together with its
/// out-neighbours, drawing from the partitions in index order. Each partition
/// is read once, sequentially.
pub struct MergeReader {
    cursors: Vec<Cursor>,
    next: u64,
    n: u64,
}

impl MergeReader {
    pub fn new(parts: &[Partition], n: u64, meter: &IoMeter) -> Result<Self> {
        let mut cursors = Vec::with_capacity(parts.len());
        for p in parts {
            if p.file.n() != n {
                return Err(Error::Inconsistent(format!(
                    "partition {} declares {} nodes, expected {n}",
                    p.index,
                    p.file.n()
                )));
            }
            let mut c = Cursor {
                reader: p.file.edges(meter)?,
                head: None,
            };
            c.advance()?;
            cursors.push(c);
        }
        Ok(MergeReader { cursors, next: 0, n })
    }

    /// Fills `out` with the out-neighbours of the next source in arrival
    /// order and returns that source, or `None` once all `n` are done.
    pub fn next_raw(&mut self, out: &mut Vec<u32>) -> Result<Option<u32>> {
        out.clear();
        if self.next == self.n {
            if self.cursors.iter().any(|c| c.head.is_some()) {
                return Err(Error::Inconsistent(
                    "partition records left after the last source".into(),
                ));
            }
            return Ok(None);
        }
        let u = self.next as u32;
        for c in &mut self.cursors {
            while let Some((s, v)) = c.head {
                if s > u {
                    break;
                }
                if s < u {
                    return Err(Error::Inconsistent(format!(
                        "partition not sorted: source {s} after {u}"
                    )));
                }
                out.push(v);
                c.advance()?;
            }
        }
        self.next += 1;
        Ok(Some(u))
    }

    /// Like [`next_raw`](Self::next_raw), but splits the neighbours: targets
    /// with zero out-degree go to `sinks`, the rest to `vu`.
    pub fn next_source(&mut self, deg: &DegreeTable, vu: &mut Vec<u32>, sinks: &mut Vec<u32>) -> Result<Option<u32>> {
        let mut raw = std::mem::take(vu);
        let got = self.next_raw(&mut raw);
        sinks.clear();
        let u = match got {
            Ok(Some(u)) => u,
            other => {
                *vu = raw;
                vu.clear();
                return other;
            }
        };
        if raw.len() as u64 != u64::from(deg.outdeg[u as usize]) {
            return Err(Error::Inconsistent(format!(
                "node {u}: {} partition records but out-degree {}",
                raw.len(),
                deg.outdeg[u as usize]
            )));
        }
        raw.retain(|&v| {
            if deg.outdeg[v as usize] == 0 {
                sinks.push(v);
                false
            } else {
                true
            }
        });
        *vu = raw;
        Ok(Some(u))
    }
}
