//! Synthetic datasets: uniform random simple digraphs and edge subsampling.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use super::format::{EdgeWriter, GraphFile, IdWidth};
use super::meter::IoMeter;
use crate::error::{Error, Result};

/// Largest edge count `generate_er` accepts; the dedup set must fit in memory.
pub const ER_MAX_EDGES: u64 = 1 << 27;

// Below this many ordered pairs, dense sampling by partial shuffle is used
// when the graph is at least half full.
const DENSE_PAIRS: u64 = 1 << 24;

/// `m` distinct edges drawn uniformly from the `n·(n-1)` ordered pairs without
/// self-loops, written in the order they were drawn.
pub fn generate_er(path: impl AsRef<Path>, n: u64, m: u64, seed: u64, meter: &IoMeter) -> Result<GraphFile> {
    if n > u64::from(u32::MAX) {
        return Err(Error::TooLarge(format!(
            "generator supports at most 2^32-1 nodes, got {n}"
        )));
    }
    let pairs = n * n.saturating_sub(1);
    if m > pairs {
        return Err(Error::InvalidParameter(format!(
            "{m} edges exceed the {pairs} possible on {n} nodes"
        )));
    }
    if m > ER_MAX_EDGES {
        return Err(Error::TooLarge(format!(
            "{m} edges exceeds the generator cap of {ER_MAX_EDGES}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = EdgeWriter::create(path, n, IdWidth::for_nodes(n), meter)?;
    if pairs <= DENSE_PAIRS && 2 * m >= pairs {
        let mut idx: Vec<u32> = (0..pairs as u32).collect();
        let span = n - 1;
        for i in 0..m as usize {
            let j = rng.random_range(i..idx.len());
            idx.swap(i, j);
            let k = u64::from(idx[i]);
            let u = k / span;
            let r = k % span;
            w.push(u, if r < u { r } else { r + 1 })?;
        }
    } else {
        let mut seen = FxHashSet::default();
        seen.reserve(m as usize);
        while (seen.len() as u64) < m {
            let u = rng.random_range(0..n);
            let r = rng.random_range(0..n - 1);
            let v = if r < u { r } else { r + 1 };
            if seen.insert((u << 32) | v) {
                w.push(u, v)?;
            }
        }
    }
    w.finish()
}

/// Keeps each edge of `g` independently with probability `p`, in one pass.
/// The node count is unchanged.
pub fn subsample(g: &GraphFile, p: f64, seed: u64, path: impl AsRef<Path>, meter: &IoMeter) -> Result<GraphFile> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = EdgeWriter::create(path, g.n(), g.id_width(), meter)?;
    let mut r = g.edges(meter)?;
    while let Some((u, v)) = r.next_edge()? {
        if rng.random::<f64>() < p {
            w.push(u, v)?;
        }
    }
    w.finish()
}
