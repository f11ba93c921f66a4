//! Gating state of the main loop and the scan-list maintenance.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::graphio::{EdgeWriter, GraphFile, IdWidth, IoMeter};
use crate::sketch::{BonArray, NodeAttrs, Sketch};

/// "No violation seen yet" value of a flush threshold.
pub const UNSET: u32 = u32::MAX;

/// `F[0..=i]` for the current pass plus the bounds carried between passes.
///
/// Positions `<= f_r` are final together with their child lists. Positions
/// `<= f_c` hold nodes whose parent is final or at `f_r + 1`, so edges into
/// them can never violate again. `f_cc` is the corresponding bound one level
/// further, used when filtering the scan list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub f: Vec<u32>,
    pub f_r: u32,
    pub f_c: u32,
    pub f_cc: u32,
    /// `f_c` at the last time a scan-list rebuild was scheduled.
    pub base: u32,
    /// Number of rebuilds scheduled.
    pub t: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            f: vec![UNSET],
            f_r: 0,
            f_c: 0,
            f_cc: 0,
            base: 1,
            t: 0,
        }
    }
}

impl Thresholds {
    pub fn begin_pass(&mut self) {
        self.f.clear();
        self.f.push(UNSET);
    }

    /// Flush counter `i` of the current pass.
    pub fn i(&self) -> usize {
        self.f.len() - 1
    }

    #[inline]
    pub fn current(&self) -> u32 {
        *self.f.last().unwrap()
    }

    #[inline]
    pub fn lower(&mut self, b: u32) {
        let last = self.f.last_mut().unwrap();
        *last = (*last).min(b);
    }

    pub fn after_flush(&mut self) {
        self.f.push(UNSET);
    }

    /// True when the pass found nothing to fix.
    pub fn quiet(&self) -> bool {
        self.f.len() == 1 && self.f[0] == UNSET
    }

    pub fn min_f(&self) -> u32 {
        self.f.iter().copied().min().unwrap_or(UNSET)
    }

    /// Moves the bounds forward after a pass whose smallest violating
    /// source sat at position `min_f`. Returns the previous `f_r`; positions
    /// `(previous, f_r]` are the ones that just became final.
    pub fn advance(&mut self, min_f: u32, sketch: &Sketch, attrs: &NodeAttrs, bon: &BonArray, n_active: u32) -> u32 {
        let alpha = self.f_r;
        debug_assert!(min_f > alpha);
        self.f_r = find(alpha, min_f - 1, sketch, attrs, bon, n_active);
        let fc = find(alpha, self.f_r + 1, sketch, attrs, bon, n_active);
        // children of nodes pruned earlier are no longer visible to find
        self.f_c = self.f_c.max(self.f_r).max(fc);
        let fcc = find(alpha, self.f_c + 1, sketch, attrs, bon, n_active);
        self.f_cc = self.f_c.max(fcc);
        alpha
    }
}

/// Scans positions `beta` down to `alpha + 1` (with `beta` clamped to
/// `[alpha, n_active]`). At the first node that has a child in the tree,
/// returns the position of its rightmost child; otherwise `beta`.
pub fn find(alpha: u32, beta: u32, sketch: &Sketch, attrs: &NodeAttrs, bon: &BonArray, n_active: u32) -> u32 {
    let beta = beta.clamp(alpha, n_active.max(alpha));
    for c in (alpha + 1..=beta).rev() {
        if let Some(x) = sketch.rightmost_child(bon.get(c)) {
            return attrs.b[x as usize];
        }
    }
    beta
}

/// Copies `(u, v)` into the replacement scan list when both endpoints lie
/// beyond the bounds that the next thresholds are expected to reach.
#[inline]
pub fn enlarge(next: &mut EdgeWriter, u: u32, v: u32, attrs: &NodeAttrs, f_c: u32, f_cc: u32) -> Result<bool> {
    if attrs.b[u as usize] > f_c && attrs.b[v as usize] > f_cc {
        next.push(u64::from(u), u64::from(v))?;
        return Ok(true);
    }
    Ok(false)
}

/// Disk-resident edge lists of the partitioned algorithm.
pub struct EdgeLists {
    /// Current scan list.
    pub e_r: GraphFile,
    /// Replacement scan list being collected, if any.
    pub e_next: Option<EdgeWriter>,
    /// Edges out of nodes with no in-edges.
    pub e_i: GraphFile,
    /// Edges into nodes with no out-edges.
    pub e_o: GraphFile,
    /// `f_c` in force while `e_next` is collected.
    pub collect_fc: u32,
    dir: PathBuf,
    generation: u32,
    n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErPruneOutcome {
    /// A collected list became the new scan list.
    pub replaced: bool,
    /// A collected list was thrown away: the bounds did not advance far
    /// enough for its filter to be safe.
    pub discarded: bool,
    /// A new collection starts with the next pass.
    pub opened: bool,
}

impl EdgeLists {
    pub fn new(dir: &Path, n: u64, e_r: GraphFile, e_i: GraphFile, e_o: GraphFile) -> Self {
        EdgeLists {
            e_r,
            e_next: None,
            e_i,
            e_o,
            collect_fc: 0,
            dir: dir.to_path_buf(),
            generation: 0,
            n,
        }
    }

    fn open_next(&mut self, meter: &IoMeter) -> Result<()> {
        self.generation += 1;
        let path = self.dir.join(format!("er-{:04}.bin", self.generation));
        self.e_next = Some(EdgeWriter::create(path, self.n, IdWidth::U32, meter)?);
        Ok(())
    }
}

/// End-of-pass scan-list maintenance.
///
/// A list collected during the pass replaces the scan list, provided `f_r`
/// has reached the `f_c` that was in force while collecting; the filter
/// assumed as much. Independently, when `f_c` has moved more than
/// `n·gamma·(m/n)^t` past the last rebuild point, collection starts anew
/// for the next pass.
pub fn er_prune(
    th: &mut Thresholds,
    lists: &mut EdgeLists,
    n: u64,
    m: u64,
    gamma: f64,
    meter: &IoMeter,
) -> Result<ErPruneOutcome> {
    let mut out = ErPruneOutcome::default();
    if let Some(w) = lists.e_next.take() {
        let sealed = w.finish()?;
        if th.f_r >= lists.collect_fc {
            let old = std::mem::replace(&mut lists.e_r, sealed);
            let _ = std::fs::remove_file(old.path());
            out.replaced = true;
        } else {
            let _ = std::fs::remove_file(sealed.path());
            out.discarded = true;
        }
    }
    if n > 0 {
        let limit = n as f64 * gamma * (m as f64 / n as f64).powi(th.t as i32);
        if f64::from(th.f_c) - f64::from(th.base) > limit {
            lists.open_next(meter)?;
            lists.collect_fc = th.f_c;
            th.base = th.f_c;
            th.t += 1;
            out.opened = true;
        }
    }
    Ok(out)
}
