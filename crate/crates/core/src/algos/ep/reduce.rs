//! The restructuring routine of the partitioned algorithm: a BFS over the
//! sketch that uses the position array itself as its queue.

use crate::error::{Error, Result};
use crate::sketch::{BonArray, NodeAttrs, Sketch, ROOT};

/// Order held by active nodes not yet reached by the current search.
const UNPLACED: u32 = u32::MAX - 4;

struct Search<'a> {
    sketch: &'a Sketch,
    attrs: &'a mut NodeAttrs,
    bon: &'a mut BonArray,
    n_active: u32,
    i_f: u32,
    i_b: u32,
}

impl Search<'_> {
    #[inline]
    fn unplaced(&self, v: u32) -> bool {
        self.attrs.b[v as usize] > self.n_active
    }

    /// Queues `v`; its position is the queue slot it lands in.
    #[inline]
    fn add(&mut self, v: u32, parent: u32) {
        self.bon.set(self.i_b, v);
        self.attrs.b[v as usize] = self.i_b;
        self.attrs.p[v as usize] = parent;
        self.i_b += 1;
    }

    fn drain(&mut self) {
        let sketch = self.sketch;
        while self.i_f != self.i_b {
            let s = self.bon.get(self.i_f);
            // warm the lists of nodes a little further down the queue
            let ahead = self.i_f + 8;
            if ahead < self.i_b {
                sketch.prefetch_heads(self.bon.get(ahead));
                if ahead + 8 < self.i_b {
                    sketch.prefetch_lists(self.bon.get(ahead + 8));
                }
            }
            self.i_f += 1;
            for v in sketch.children(s).chain(sketch.staged(s)) {
                if self.unplaced(v) {
                    self.add(v, s);
                }
            }
        }
    }
}

/// Re-derives positions `f_r+1 ..` by BFS over the in-memory tree plus the
/// staged edges, then rebuilds the pool from the new order.
///
/// Positions up to `f_r` are final and untouched. Positions `f_r+1 ..= f_c`
/// keep their nodes and start out in the queue. Every later position is
/// vacated first and handed out again as nodes are reached. Once the queue
/// drains, root children that are still unplaced are started in list order.
///
/// `bon` must hold every active node somewhere in `1..=n_active`, or the
/// nodes it misses must already carry an order above `n_active`.
///
/// Returns the last position assigned, which must equal `n_active`.
pub fn ep_reduce(
    sketch: &mut Sketch,
    attrs: &mut NodeAttrs,
    bon: &mut BonArray,
    f_r: u32,
    f_c: u32,
    n_active: u32,
) -> Result<u32> {
    let fixed = f_r.max(f_c).min(n_active);
    for i in fixed + 1..=n_active {
        attrs.b[bon.get(i) as usize] = UNPLACED;
    }
    let mut q = Search {
        sketch,
        attrs,
        bon,
        n_active,
        i_f: f_r + 1,
        i_b: fixed + 1,
    };
    q.drain();
    let sk = q.sketch;
    for w in sk.children(ROOT) {
        if q.unplaced(w) {
            q.add(w, ROOT);
            q.drain();
        }
    }
    let i_f = q.i_f;
    if i_f - 1 != n_active {
        return Err(Error::Inconsistent(format!(
            "restructure placed {} of {n_active} nodes",
            i_f - 1
        )));
    }
    sketch.reset_pool(bon, attrs, f_r + 1, i_f, f_r)?;
    Ok(i_f - 1)
}
