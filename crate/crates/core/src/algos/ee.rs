//! Restructure on every violating edge, then recompute all orders.

use super::vbfs::is_vbfs_edge;
use super::{BfsTree, Guard, RunOptions, RunOutput, RunStats};
use crate::error::Result;
use crate::graphio::{check_node_count, GraphFile, IoMeter};
use crate::sketch::{NodeAttrs, Sketch, ROOT};

/// Starts from the star tree (all nodes under the root in id order). Each
/// scanned violating edge `(u, v)` moves `v` to be the rightmost child of
/// `u`, after which every order is recomputed by a traversal of the whole
/// tree. Stops after a pass without violations.
pub fn ee_bfs(g: &GraphFile, opts: &RunOptions, meter: &IoMeter) -> Result<RunOutput> {
    let n = check_node_count(g.n())?;
    let guard = Guard::new(opts, n as u64);
    let mut attrs = NodeAttrs::star(n);
    let mut tree = Sketch::new(n, n.max(1));
    for v in 0..n as u32 {
        tree.insert_rightmost_child(ROOT, v)?;
    }
    let mut queue = vec![0u32; n];
    let mut stats = RunStats {
        edge_budget: n as u64,
        ..RunStats::default()
    };
    let mut moves = 0u64;
    loop {
        stats.outer_iterations += 1;
        guard.pass(stats.outer_iterations)?;
        let mut changed = false;
        let mut r = g.edges(meter)?;
        while let Some((u, v)) = r.next_pair()? {
            if !is_vbfs_edge(u, v, &attrs) {
                continue;
            }
            tree.detach_child(attrs.p[v as usize], v)?;
            tree.insert_rightmost_child(u, v)?;
            attrs.p[v as usize] = u;
            recompute_orders(&tree, &mut attrs.b, &mut queue);
            stats.imp_invocations += 1;
            changed = true;
            moves += 1;
            if moves.is_multiple_of(1024) {
                guard.time()?;
            }
        }
        if !changed {
            break;
        }
        stats.restructuring_passes += 1;
    }
    stats.peak_in_memory_edges = tree.peak_edges() as u64;
    stats.mem("attrs", attrs.memory_bytes(), false);
    stats.mem("tree", tree.memory_bytes(), false);
    stats.mem("queue", 4 * n as u64, false);
    Ok(RunOutput {
        tree: BfsTree::from(attrs),
        stats,
    })
}

/// Breadth-first positions of the ordered tree, restarting from each root
/// child in turn once the queue drains.
fn recompute_orders(tree: &Sketch, b: &mut [u32], queue: &mut [u32]) {
    let mut pos = 0u32;
    for w in tree.children(ROOT) {
        let (mut head, mut tail) = (0usize, 1usize);
        queue[0] = w;
        while head < tail {
            let s = queue[head];
            head += 1;
            pos += 1;
            b[s as usize] = pos;
            for c in tree.children(s) {
                queue[tail] = c;
                tail += 1;
            }
        }
    }
}
