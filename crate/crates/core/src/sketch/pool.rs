use super::attrs::{NodeAttrs, ROOT};
use super::bon::BonArray;
use super::evicted::EvictedEdges;
use crate::error::{Error, Result};

/// End-of-chain / empty-list marker.
pub const NIL: u32 = u32::MAX;

/// Ordered tree plus staged edges, stored as singly linked chains in one
/// flat slot pool.
///
/// Every node has a child chain and a staged chain, each with head and tail
/// so appends are O(1). The dummy root is node index `n`; its child links are
/// kept in the pool but are not graph edges, so they do not count against the
/// edge budget.
#[derive(Debug, Clone)]
pub struct Sketch {
    n: usize,
    capacity: usize,
    slots: Vec<Slot>,
    bump: usize,
    free: u32,
    lists: Vec<Lists>,
    tree_edges: usize,
    root_links: usize,
    staged: usize,
    peak: usize,
}

#[inline(always)]
pub(crate) fn prefetch<T>(x: &T) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: a prefetch never faults and the pointer comes from a reference
    unsafe {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        _mm_prefetch::<_MM_HINT_T0>((x as *const T).cast());
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = x;
}

/// One link: the node it points at and the next slot in its chain.
#[derive(Debug, Clone, Copy)]
struct Slot {
    target: u32,
    next: u32,
}

impl Slot {
    const EMPTY: Slot = Slot { target: NIL, next: NIL };
}

/// Head and tail slots of one node's two chains, kept together so a lookup
/// touches one cache line.
#[derive(Debug, Clone, Copy)]
struct Lists {
    tree_head: u32,
    tree_tail: u32,
    stage_head: u32,
    stage_tail: u32,
}

impl Lists {
    const EMPTY: Lists = Lists {
        tree_head: NIL,
        tree_tail: NIL,
        stage_head: NIL,
        stage_tail: NIL,
    };
}

/// Iterator over one chain.
pub struct Chain<'a> {
    sketch: &'a Sketch,
    slot: u32,
}

impl Iterator for Chain<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.slot == NIL {
            return None;
        }
        let s = self.slot as usize;
        self.slot = self.sketch.slots[s].next;
        Some(self.sketch.slots[s].target)
    }
}

impl Sketch {
    /// Sketch over `n` nodes holding at most `capacity` edges.
    pub fn new(n: usize, capacity: usize) -> Self {
        let slots = capacity + n;
        Sketch {
            n,
            capacity,
            slots: vec![Slot::EMPTY; slots],
            bump: 0,
            free: NIL,
            lists: vec![Lists::EMPTY; n + 1],
            tree_edges: 0,
            root_links: 0,
            staged: 0,
            peak: 0,
        }
    }

    #[inline]
    fn idx(&self, u: u32) -> usize {
        if u == ROOT {
            self.n
        } else {
            u as usize
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn tree_edge_count(&self) -> usize {
        self.tree_edges
    }

    pub fn staged_count(&self) -> usize {
        self.staged
    }

    pub fn root_link_count(&self) -> usize {
        self.root_links
    }

    /// Graph edges currently held: tree edges plus staged edges.
    pub fn edge_count(&self) -> usize {
        self.tree_edges + self.staged
    }

    /// Largest [`edge_count`](Self::edge_count) seen so far.
    pub fn peak_edges(&self) -> usize {
        self.peak
    }

    pub fn is_full(&self) -> bool {
        self.edge_count() >= self.capacity
    }

    pub fn memory_bytes(&self) -> u64 {
        8 * self.slots.len() as u64 + 16 * self.lists.len() as u64
    }

    fn alloc(&mut self, target: u32) -> u32 {
        let slot = if self.free != NIL {
            let s = self.free;
            self.free = self.slots[s as usize].next;
            s
        } else {
            let s = self.bump;
            self.bump += 1;
            s as u32
        };
        self.slots[slot as usize].target = target;
        self.slots[slot as usize].next = NIL;
        slot
    }

    fn release(&mut self, slot: u32) {
        self.slots[slot as usize].target = NIL;
        self.slots[slot as usize].next = self.free;
        self.free = slot;
    }

    fn charge_edge(&mut self) -> Result<()> {
        if self.edge_count() >= self.capacity {
            return Err(Error::CapacityOverflow {
                capacity: self.capacity,
            });
        }
        Ok(())
    }

    fn note_peak(&mut self) {
        self.peak = self.peak.max(self.edge_count());
    }

    /// Appends `v` to the child list of `u` (`u` may be [`ROOT`]).
    pub fn insert_rightmost_child(&mut self, u: u32, v: u32) -> Result<()> {
        let ui = self.idx(u);
        if ui == self.n {
            self.root_links += 1;
        } else {
            self.charge_edge()?;
            self.tree_edges += 1;
        }
        let slot = self.alloc(v);
        match self.lists[ui].tree_tail {
            NIL => self.lists[ui].tree_head = slot,
            t => self.slots[t as usize].next = slot,
        }
        self.lists[ui].tree_tail = slot;
        self.note_peak();
        Ok(())
    }

    /// Appends `(u, v)` to the staged chain of `u`.
    pub fn stage_edge(&mut self, u: u32, v: u32) -> Result<()> {
        self.charge_edge()?;
        let ui = u as usize;
        let slot = self.alloc(v);
        match self.lists[ui].stage_tail {
            NIL => self.lists[ui].stage_head = slot,
            t => self.slots[t as usize].next = slot,
        }
        self.lists[ui].stage_tail = slot;
        self.staged += 1;
        self.note_peak();
        Ok(())
    }

    pub fn children(&self, u: u32) -> Chain<'_> {
        Chain {
            sketch: self,
            slot: self.lists[self.idx(u)].tree_head,
        }
    }

    pub fn staged(&self, u: u32) -> Chain<'_> {
        Chain {
            sketch: self,
            slot: self.lists[self.idx(u)].stage_head,
        }
    }

    /// Pool slots of `u`'s child list, in list order.
    pub fn child_slots(&self, u: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut s = self.lists[self.idx(u)].tree_head;
        while s != NIL {
            out.push(s);
            s = self.slots[s as usize].next;
        }
        out
    }

    /// Cache hint for `u`'s list heads.
    #[inline]
    pub fn prefetch_lists(&self, u: u32) {
        prefetch(&self.lists[self.idx(u)]);
    }

    /// Cache hint for the first slot of each of `u`'s chains.
    #[inline]
    pub fn prefetch_heads(&self, u: u32) {
        let l = self.lists[self.idx(u)];
        for h in [l.tree_head, l.stage_head] {
            if h != NIL {
                prefetch(&self.slots[h as usize]);
            }
        }
    }

    #[inline]
    pub fn rightmost_child(&self, u: u32) -> Option<u32> {
        match self.lists[self.idx(u)].tree_tail {
            NIL => None,
            s => Some(self.slots[s as usize].target),
        }
    }

    #[inline]
    pub fn is_leaf(&self, u: u32) -> bool {
        self.lists[self.idx(u)].tree_head == NIL
    }

    /// Unlinks `v` from `u`'s child list. Linear in the number of children.
    pub fn detach_child(&mut self, u: u32, v: u32) -> Result<()> {
        let ui = self.idx(u);
        let mut prev = NIL;
        let mut s = self.lists[ui].tree_head;
        while s != NIL && self.slots[s as usize].target != v {
            prev = s;
            s = self.slots[s as usize].next;
        }
        if s == NIL {
            return Err(Error::Inconsistent(format!("{v} is not a child of {u}")));
        }
        let after = self.slots[s as usize].next;
        match prev {
            NIL => self.lists[ui].tree_head = after,
            p => self.slots[p as usize].next = after,
        }
        if self.lists[ui].tree_tail == s {
            self.lists[ui].tree_tail = prev;
        }
        self.release(s);
        if ui == self.n {
            self.root_links -= 1;
        } else {
            self.tree_edges -= 1;
        }
        Ok(())
    }

    /// Moves all of `u`'s child edges to `log` with their sibling ranks and
    /// frees their slots. The children's attributes are left alone.
    pub fn v_prune(&mut self, u: u32, log: &mut EvictedEdges) -> Result<usize> {
        let ui = self.idx(u);
        let mut s = self.lists[ui].tree_head;
        let mut rank = 0u32;
        while s != NIL {
            let after = self.slots[s as usize].next;
            log.append(u, self.slots[s as usize].target, rank)?;
            self.release(s);
            rank += 1;
            s = after;
        }
        self.lists[ui].tree_head = NIL;
        self.lists[ui].tree_tail = NIL;
        if ui == self.n {
            self.root_links -= rank as usize;
        } else {
            self.tree_edges -= rank as usize;
        }
        Ok(rank as usize)
    }

    /// Empties the whole pool and every list.
    pub fn clear(&mut self) {
        self.lists.fill(Lists::EMPTY);
        self.reset_slots();
    }

    fn reset_slots(&mut self) {
        self.bump = 0;
        self.free = NIL;
        self.tree_edges = 0;
        self.root_links = 0;
        self.staged = 0;
    }

    /// Empties the pool and every list, then rebuilds the tree from
    /// positions `lo..hi` of `bon`: each node is appended to its parent's
    /// child list in position order, so every child list ends up contiguous
    /// and lists appear in the pool in their parent's position order. Nodes
    /// whose parent is at a position `<= finalized` are not re-linked; that
    /// edge has been evicted.
    pub fn reset_pool(&mut self, bon: &BonArray, attrs: &NodeAttrs, lo: u32, hi: u32, finalized: u32) -> Result<()> {
        self.clear();
        let mut tree_edges = 0usize;
        for i in lo..hi {
            // the parent lookups below are random; start them early
            if i + 16 < hi {
                prefetch(&attrs.p[bon.get(i + 16) as usize]);
            }
            if i + 8 < hi {
                let pu = attrs.p[bon.get(i + 8) as usize];
                if pu != ROOT {
                    prefetch(&attrs.b[pu as usize]);
                    prefetch(&self.lists[pu as usize]);
                }
            }
            let u = bon.get(i);
            let pu = attrs.p[u as usize];
            let pi = if pu == ROOT {
                self.n
            } else {
                let bp = attrs.b[pu as usize];
                if bp <= finalized {
                    continue;
                }
                if bp >= i {
                    return Err(Error::Inconsistent(format!(
                        "node {u} at position {i} has parent {pu} at position {bp}"
                    )));
                }
                tree_edges += 1;
                pu as usize
            };
            let slot = self.bump as u32;
            self.bump += 1;
            self.slots[slot as usize].target = u;
            self.slots[slot as usize].next = NIL;
            match self.lists[pi].tree_tail {
                NIL => self.lists[pi].tree_head = slot,
                t => self.slots[t as usize].next = slot,
            }
            self.lists[pi].tree_tail = slot;
        }
        if tree_edges > self.capacity {
            return Err(Error::CapacityOverflow {
                capacity: self.capacity,
            });
        }
        self.tree_edges = tree_edges;
        self.root_links = self.bump - tree_edges;
        self.note_peak();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphio::IoMeter;
    use crate::sketch::read_evicted;

    #[test]
    fn child_lists_append() {
        let mut s = Sketch::new(5, 5);
        assert_eq!(s.rightmost_child(0), None);
        s.insert_rightmost_child(0, 1).unwrap();
        assert_eq!(s.children(0).collect::<Vec<_>>(), vec![1]);
        s.insert_rightmost_child(0, 2).unwrap();
        s.insert_rightmost_child(0, 3).unwrap();
        assert_eq!(s.children(0).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(s.rightmost_child(0), Some(3));
        assert_eq!(s.tree_edge_count(), 3);
    }

    #[test]
    fn root_links_are_free() {
        let mut s = Sketch::new(3, 1);
        for v in 0..3 {
            s.insert_rightmost_child(ROOT, v).unwrap();
        }
        assert_eq!(s.edge_count(), 0);
        assert_eq!(s.root_link_count(), 3);
        s.stage_edge(0, 1).unwrap();
        assert!(s.is_full());
        assert_eq!(s.children(ROOT).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn staged_chains_keep_arrival_order() {
        let mut s = Sketch::new(4, 10);
        s.stage_edge(1, 3).unwrap();
        s.stage_edge(2, 0).unwrap();
        s.stage_edge(1, 2).unwrap();
        assert_eq!(s.staged(1).collect::<Vec<_>>(), vec![3, 2]);
        assert_eq!(s.staged(2).collect::<Vec<_>>(), vec![0]);
        assert_eq!(s.staged_count(), 3);
    }

    #[test]
    fn staging_past_the_budget_fails() {
        let mut s = Sketch::new(4, 6);
        s.insert_rightmost_child(0, 1).unwrap();
        s.insert_rightmost_child(0, 2).unwrap();
        for v in 0..4 {
            s.stage_edge(3, v).unwrap();
        }
        assert_eq!(s.edge_count(), 6);
        assert!(matches!(
            s.stage_edge(3, 0),
            Err(Error::CapacityOverflow { capacity: 6 })
        ));
        assert!(matches!(
            s.insert_rightmost_child(1, 3),
            Err(Error::CapacityOverflow { .. })
        ));
        assert_eq!(s.peak_edges(), 6);
    }

    #[test]
    fn detach_fixes_tail() {
        let mut s = Sketch::new(5, 5);
        for v in [1, 2, 3] {
            s.insert_rightmost_child(0, v).unwrap();
        }
        s.detach_child(0, 3).unwrap();
        assert_eq!(s.rightmost_child(0), Some(2));
        s.detach_child(0, 1).unwrap();
        assert_eq!(s.children(0).collect::<Vec<_>>(), vec![2]);
        s.insert_rightmost_child(0, 4).unwrap();
        assert_eq!(s.children(0).collect::<Vec<_>>(), vec![2, 4]);
        assert!(s.detach_child(0, 1).is_err());
        assert_eq!(s.tree_edge_count(), 2);
    }

    #[test]
    fn prune_logs_ranks_and_leaves_a_leaf() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let mut log = EvictedEdges::create(dir.path().join("ev"), &meter).unwrap();
        let mut s = Sketch::new(5, 5);
        assert_eq!(s.v_prune(4, &mut log).unwrap(), 0);
        s.insert_rightmost_child(0, 1).unwrap();
        s.insert_rightmost_child(0, 2).unwrap();
        s.insert_rightmost_child(1, 3).unwrap();
        assert_eq!(s.v_prune(0, &mut log).unwrap(), 2);
        assert_eq!(s.rightmost_child(0), None);
        assert_eq!(s.tree_edge_count(), 1);
        log.flush().unwrap();
        assert_eq!(read_evicted(log.path(), &meter).unwrap(), vec![(0, 1, 0), (0, 2, 1)]);
        // freed slots are reused
        s.stage_edge(2, 4).unwrap();
        s.stage_edge(2, 3).unwrap();
        s.stage_edge(2, 1).unwrap();
        assert_eq!(s.edge_count(), 4);
    }

    #[test]
    fn reset_rebuilds_contiguous_lists() {
        // bon = [1, 3, 2] (nodes), parents 1 -> root, 3 -> 1, 2 -> 1
        let mut attrs = NodeAttrs::unordered(4);
        let mut bon = BonArray::new(3);
        for (pos, v) in [1u32, 3, 2].into_iter().enumerate() {
            bon.set(pos as u32 + 1, v);
            attrs.b[v as usize] = pos as u32 + 1;
        }
        attrs.p[1] = ROOT;
        attrs.p[3] = 1;
        attrs.p[2] = 1;
        let mut s = Sketch::new(4, 8);
        s.stage_edge(1, 2).unwrap();
        s.reset_pool(&bon, &attrs, 1, 4, 0).unwrap();
        assert_eq!(s.staged_count(), 0);
        assert_eq!(s.children(1).collect::<Vec<_>>(), vec![3, 2]);
        assert_eq!(s.children(ROOT).collect::<Vec<_>>(), vec![1]);
        let slots = s.child_slots(1);
        assert_eq!(slots[1], slots[0] + 1);
        assert_eq!(s.tree_edge_count(), 2);

        let mut empty = Sketch::new(4, 8);
        empty.reset_pool(&bon, &attrs, 1, 1, 0).unwrap();
        assert_eq!(empty.edge_count() + empty.root_link_count(), 0);
    }

    #[test]
    fn reset_rejects_parent_after_child() {
        let mut attrs = NodeAttrs::unordered(2);
        let mut bon = BonArray::new(2);
        bon.set(1, 0);
        bon.set(2, 1);
        attrs.b[0] = 1;
        attrs.b[1] = 2;
        attrs.p[0] = 1;
        let mut s = Sketch::new(2, 4);
        assert!(matches!(
            s.reset_pool(&bon, &attrs, 1, 3, 0),
            Err(Error::Inconsistent(_))
        ));
    }
}
