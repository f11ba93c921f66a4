//! Restructure once per batch of `K·n` edges with an in-memory BFS.

use super::{check_k, BfsTree, Guard, RunOptions, RunOutput, RunStats};
use crate::error::{Error, Result};
use crate::graphio::{check_node_count, edge_capacity, GraphFile, IoMeter};
use crate::sketch::{NodeAttrs, ROOT};

/// Reusable buffers for [`im_bfs`].
#[derive(Debug, Default)]
pub struct ImBfs {
    order: Vec<u32>,
    child_off: Vec<u32>,
    child: Vec<u32>,
    stage_off: Vec<u32>,
    stage: Vec<u32>,
    queue: Vec<u32>,
    marked: Vec<bool>,
}

impl ImBfs {
    pub fn new(n: usize) -> Self {
        ImBfs {
            order: vec![0; n],
            child_off: vec![0; n + 2],
            child: vec![0; n],
            stage_off: vec![0; n + 1],
            stage: Vec::new(),
            queue: vec![0; n],
            marked: vec![false; n],
        }
    }

    pub fn memory_bytes(&self) -> u64 {
        4 * (self.order.len() + self.child_off.len() + self.child.len() + self.stage_off.len() + self.queue.len())
            as u64
            + 4 * self.stage.capacity() as u64
            + self.marked.len() as u64
    }

    /// BFS tree of `tree ∪ batch` written to `out`. After visiting a node its
    /// tree children are enqueued left to right, then its batch targets in
    /// batch order. Root children of `tree` are restart points, tried in
    /// order once the queue drains; nodes are marked when enqueued.
    pub fn run(&mut self, tree: &NodeAttrs, batch: &[(u32, u32)], out: &mut NodeAttrs) -> Result<()> {
        let n = tree.n();
        if self.order.len() != n {
            *self = ImBfs::new(n);
        }
        out.b.resize(n, 0);
        out.p.resize(n, ROOT);

        // nodes by current order
        for v in 0..n {
            let b = tree.b[v];
            if b == 0 || b as usize > n {
                return Err(Error::MalformedTree(format!("node {v} has order {b} outside 1..={n}")));
            }
            self.order[b as usize - 1] = v as u32;
        }
        // children grouped by parent (root last), each group in order
        self.child_off.fill(0);
        for &p in &tree.p {
            let i = if p == ROOT { n } else { p as usize };
            self.child_off[i + 1] += 1;
        }
        for i in 1..=n + 1 {
            self.child_off[i] += self.child_off[i - 1];
        }
        let mut fill = self.child_off.clone();
        for &v in &self.order {
            let p = tree.p[v as usize];
            let i = if p == ROOT { n } else { p as usize };
            self.child[fill[i] as usize] = v;
            fill[i] += 1;
        }
        // batch grouped by source, stable
        self.stage_off.fill(0);
        for &(u, _) in batch {
            self.stage_off[u as usize + 1] += 1;
        }
        for i in 1..=n {
            self.stage_off[i] += self.stage_off[i - 1];
        }
        self.stage.resize(batch.len(), 0);
        let mut sfill = self.stage_off.clone();
        for &(u, v) in batch {
            self.stage[sfill[u as usize] as usize] = v;
            sfill[u as usize] += 1;
        }

        self.marked.fill(false);
        let (mut head, mut tail) = (0usize, 0usize);
        let mut pos = 0u32;
        let roots = self.child_off[n] as usize..self.child_off[n + 1] as usize;
        for ri in roots {
            let w = self.child[ri];
            if self.marked[w as usize] {
                continue;
            }
            self.marked[w as usize] = true;
            out.p[w as usize] = ROOT;
            self.queue[tail] = w;
            tail += 1;
            while head < tail {
                let s = self.queue[head] as usize;
                head += 1;
                pos += 1;
                out.b[s] = pos;
                let kids = self.child_off[s] as usize..self.child_off[s + 1] as usize;
                let staged = self.stage_off[s] as usize..self.stage_off[s + 1] as usize;
                for &v in self.child[kids].iter().chain(&self.stage[staged]) {
                    if !self.marked[v as usize] {
                        self.marked[v as usize] = true;
                        out.p[v as usize] = s as u32;
                        self.queue[tail] = v;
                        tail += 1;
                    }
                }
            }
        }
        if pos as usize != n {
            return Err(Error::MalformedTree(format!(
                "only {pos} of {n} nodes reachable from the root"
            )));
        }
        Ok(())
    }
}

/// One restructuring step: the BFS tree of `tree ∪ batch`.
pub fn im_bfs(tree: &NodeAttrs, batch: &[(u32, u32)]) -> Result<NodeAttrs> {
    let mut out = NodeAttrs::default();
    ImBfs::new(tree.n()).run(tree, batch, &mut out)?;
    Ok(out)
}

/// Starts from the star tree and replaces it with [`im_bfs`] of every batch
/// of `max(1, ⌊K·n⌋)` consecutive edges. Stops after a pass in which no
/// batch changed the set of parent-child pairs.
pub fn eb_bfs(g: &GraphFile, opts: &RunOptions, meter: &IoMeter) -> Result<RunOutput> {
    check_k(opts.k)?;
    let n = check_node_count(g.n())?;
    let guard = Guard::new(opts, n as u64);
    let batch_size = ((opts.k * n as f64 + 1e-9).floor() as usize).max(1);
    let mut cur = NodeAttrs::star(n);
    let mut next = NodeAttrs::star(n);
    let mut work = ImBfs::new(n);
    let mut batch: Vec<(u32, u32)> = Vec::with_capacity(batch_size.min(g.m() as usize));
    let mut stats = RunStats {
        edge_budget: edge_capacity(n as u64, opts.k),
        ..RunStats::default()
    };
    let mut tree_edges = 0u64;
    loop {
        stats.outer_iterations += 1;
        guard.pass(stats.outer_iterations)?;
        let mut changed = false;
        let mut r = g.edges(meter)?;
        loop {
            batch.clear();
            while batch.len() < batch_size {
                match r.next_pair()? {
                    Some(e) => batch.push(e),
                    None => break,
                }
            }
            if batch.is_empty() {
                break;
            }
            stats.peak_in_memory_edges = stats.peak_in_memory_edges.max(tree_edges + batch.len() as u64);
            work.run(&cur, &batch, &mut next)?;
            stats.imp_invocations += 1;
            if next.p != cur.p {
                changed = true;
                tree_edges = next.p.iter().filter(|&&p| p != ROOT).count() as u64;
            }
            std::mem::swap(&mut cur, &mut next);
            guard.time()?;
        }
        if !changed {
            break;
        }
        stats.restructuring_passes += 1;
    }
    stats.mem("attrs", cur.memory_bytes(), false);
    stats.mem("attrs_next", next.memory_bytes(), false);
    stats.mem("batch", 8 * batch.capacity() as u64, false);
    stats.mem("im_bfs", work.memory_bytes(), false);
    Ok(RunOutput {
        tree: BfsTree::from(cur),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_batch_is_a_fixpoint() {
        let t = NodeAttrs {
            b: vec![1, 3, 2],
            p: vec![ROOT, 2, 0],
        };
        assert_eq!(im_bfs(&t, &[]).unwrap(), t);
    }

    #[test]
    fn star_with_two_staged_edges() {
        // star(r; 1, 2, 3) on nodes 1..=3; node 0 is an extra last root child
        let t = NodeAttrs {
            b: vec![4, 1, 2, 3],
            p: vec![ROOT; 4],
        };
        let out = im_bfs(&t, &[(1, 3), (1, 2)]).unwrap();
        assert_eq!(out.p, vec![ROOT, ROOT, 1, 1]);
        assert_eq!(&out.b[1..], &[1, 3, 2]);
        assert_eq!(out.b[0], 4);
    }
}
