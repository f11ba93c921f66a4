//! Ground truth for tests: in-memory BFS, the tree validator and exact
//! longest-simple-path lengths of tiny graphs.

use crate::algos::{is_vbfs_in, BfsTree};
use crate::error::{Error, Result};
use crate::graphio::{GraphFile, IoMeter};
use crate::sketch::ROOT;

/// Adjacency lists, each in the order the edges appear in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InMemGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl InMemGraph {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in edges {
            offsets[u as usize + 1] += 1;
        }
        for i in 1..=n {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len()];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        InMemGraph { offsets, targets }
    }

    pub fn load(g: &GraphFile, meter: &IoMeter) -> Result<Self> {
        let n = crate::graphio::check_node_count(g.n())?;
        let edges: Vec<(u32, u32)> = g
            .read_all(meter)?
            .into_iter()
            .map(|(u, v)| (u as u32, v as u32))
            .collect();
        Ok(Self::from_edges(n, &edges))
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn out(&self, u: u32) -> &[u32] {
        &self.targets[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n() as u32).flat_map(move |u| self.out(u).iter().map(move |&v| (u, v)))
    }
}

/// Queue BFS marking on enqueue, neighbours in file order. Whenever the
/// queue runs dry the next unvisited node of `restart_order` starts a new
/// tree under the root.
pub fn reference_bfs(g: &InMemGraph, restart_order: &[u32]) -> BfsTree {
    let n = g.n();
    let mut b = vec![0u32; n];
    let mut p = vec![ROOT; n];
    let mut seen = vec![false; n];
    let mut queue = Vec::with_capacity(n);
    let mut head = 0;
    for &w in restart_order {
        if seen[w as usize] {
            continue;
        }
        seen[w as usize] = true;
        queue.push(w);
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            b[s as usize] = head as u32;
            for &v in g.out(s) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    p[v as usize] = s;
                    queue.push(v);
                }
            }
        }
    }
    BfsTree { b, p }
}

/// Orders implied by the tree's shape alone: BFS over the tree with children
/// sorted by `b`, restarting at root children (also sorted by `b`).
pub fn tree_order(tree: &BfsTree) -> Vec<u32> {
    let n = tree.n();
    let mut by_b: Vec<u32> = (0..n as u32).collect();
    by_b.sort_by_key(|&v| tree.b[v as usize]);
    let mut off = vec![0usize; n + 2];
    let slot = |p: u32| if p == ROOT { n } else { p as usize };
    for &p in &tree.p {
        off[slot(p) + 1] += 1;
    }
    for i in 1..n + 2 {
        off[i] += off[i - 1];
    }
    let mut fill = off.clone();
    let mut kids = vec![0u32; n];
    for &v in &by_b {
        let s = slot(tree.p[v as usize]);
        kids[fill[s]] = v;
        fill[s] += 1;
    }
    let mut out = vec![0u32; n];
    let mut queue = Vec::with_capacity(n);
    let mut head = 0;
    for &w in &kids[off[n]..off[n + 1]] {
        queue.push(w);
        while head < queue.len() {
            let s = queue[head];
            head += 1;
            out[s as usize] = head as u32;
            queue.extend_from_slice(&kids[off[s as usize]..off[s as usize + 1]]);
        }
    }
    out
}

/// Violating edges found by [`validate_bfs_tree`]. Only the first
/// `MAX_REPORTED` are kept; `total` counts all of them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<(u64, u64)>,
    pub total: u64,
}

impl Validation {
    pub const MAX_REPORTED: usize = 1000;

    pub fn is_valid(&self) -> bool {
        self.total == 0
    }
}

fn structural(tree: &BfsTree, n: usize) -> Result<()> {
    let bad = |s: String| Err(Error::MalformedTree(s));
    if tree.n() != n || tree.p.len() != n {
        return bad(format!("tree has {} nodes, graph has {n}", tree.n()));
    }
    let mut seen = vec![false; n + 1];
    for (v, &b) in tree.b.iter().enumerate() {
        if b == 0 || b as usize > n || std::mem::replace(&mut seen[b as usize], true) {
            return bad(format!("order of node {v} ({b}) breaks the permutation of 1..={n}"));
        }
    }
    for (v, &p) in tree.p.iter().enumerate() {
        if p == ROOT {
            continue;
        }
        if p as usize >= n || p as usize == v {
            return bad(format!("node {v} has invalid parent {p}"));
        }
        if tree.b[p as usize] >= tree.b[v] {
            return bad(format!("parent {p} of node {v} is not ordered before it"));
        }
    }
    if let Some(v) = tree_order(tree).iter().zip(&tree.b).position(|(a, b)| a != b) {
        return bad(format!(
            "order of node {v} disagrees with the breadth-first order of the tree"
        ));
    }
    Ok(())
}

/// Checks that `tree` is a BFS tree of `g`: `b` a permutation of `1..=n`,
/// parents before children, `b` equal to the tree's own breadth-first order,
/// every tree edge present in `g`, and no violating edge. One sequential
/// pass over `g`. Structural defects are errors; violating edges are
/// returned.
pub fn validate_bfs_tree(g: &GraphFile, tree: &BfsTree, meter: &IoMeter) -> Result<Validation> {
    let n = crate::graphio::check_node_count(g.n())?;
    structural(tree, n)?;
    let mut has_edge: Vec<bool> = tree.p.iter().map(|&p| p == ROOT).collect();
    let mut out = Validation::default();
    let mut r = g.edges(meter)?;
    while let Some((u, v)) = r.next_pair()? {
        if tree.p[v as usize] == u {
            has_edge[v as usize] = true;
        }
        if is_vbfs_in(&tree.b, &tree.p, u, v) {
            out.total += 1;
            if out.violations.len() < Validation::MAX_REPORTED {
                out.violations.push((u64::from(u), u64::from(v)));
            }
        }
    }
    if let Some(v) = has_edge.iter().position(|&h| !h) {
        return Err(Error::MalformedTree(format!(
            "tree edge ({}, {v}) is not an edge of the graph",
            tree.p[v]
        )));
    }
    Ok(out)
}

/// Largest graph [`brute_llsp`] accepts.
pub const LLSP_MAX_NODES: usize = 12;

/// Length (in edges) of the longest simple path, by exhaustive search.
pub fn brute_llsp(g: &InMemGraph) -> Result<u32> {
    let n = g.n();
    if n > LLSP_MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "{n} nodes is too many for exhaustive search"
        )));
    }
    fn dfs(g: &InMemGraph, u: u32, visited: u32, len: u32, best: &mut u32, cap: u32) {
        *best = (*best).max(len);
        if *best == cap {
            return;
        }
        for &v in g.out(u) {
            if visited & (1 << v) == 0 {
                dfs(g, v, visited | (1 << v), len + 1, best, cap);
            }
        }
    }
    let cap = n.saturating_sub(1) as u32;
    let mut best = 0;
    for s in 0..n as u32 {
        dfs(g, s, 1 << s, 0, &mut best, cap);
        if best == cap {
            break;
        }
    }
    Ok(best)
}

/// Same quantity by dynamic programming over (visited set, end node).
pub fn llsp_dp(g: &InMemGraph) -> Result<u32> {
    let n = g.n();
    if n > 20 {
        return Err(Error::InvalidParameter(format!("{n} nodes is too many for subset DP")));
    }
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] |= 1 << v;
    }
    let mut best = 0;
    for mask in 1usize..1 << n {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        best = best.max(mask.count_ones() - 1);
        for u in 0..n {
            if ends & (1 << u) == 0 {
                continue;
            }
            for &v in g.out(u as u32) {
                if mask & (1 << v) == 0 {
                    reach[mask | 1 << v] |= 1 << v;
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_reference_is_a_star() {
        let g = InMemGraph::from_edges(4, &[]);
        let t = reference_bfs(&g, &[0, 1, 2, 3]);
        assert_eq!(t.b, vec![1, 2, 3, 4]);
        assert_eq!(t.p, vec![ROOT; 4]);
    }

    #[test]
    fn triangle_is_a_chain() {
        let g = InMemGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let t = reference_bfs(&g, &[0, 1, 2]);
        assert_eq!(t.b, vec![1, 2, 3]);
        assert_eq!(t.p, vec![ROOT, 0, 1]);
    }

    #[test]
    fn llsp_small_cases() {
        assert_eq!(brute_llsp(&InMemGraph::from_edges(5, &[])).unwrap(), 0);
        let path = InMemGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(brute_llsp(&path).unwrap(), 4);
        assert_eq!(llsp_dp(&path).unwrap(), 4);
        let cyc = InMemGraph::from_edges(3, &[(0, 1), (1, 0), (1, 2)]);
        assert_eq!(brute_llsp(&cyc).unwrap(), 2);
        assert!(brute_llsp(&InMemGraph::from_edges(13, &[])).is_err());
    }

    #[test]
    fn tree_order_restarts_after_each_component() {
        // root children 0 (b=1) and 3 (b=3); 0 -> 1 (b=2); 3 -> 2 (b=4)
        let t = BfsTree {
            b: vec![1, 2, 4, 3],
            p: vec![ROOT, 0, 3, ROOT],
        };
        assert_eq!(tree_order(&t), t.b);
        let interleaved = BfsTree {
            b: vec![1, 3, 4, 2],
            p: vec![ROOT, 0, 3, ROOT],
        };
        assert_ne!(tree_order(&interleaved), interleaved.b);
    }
}
