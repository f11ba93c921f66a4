use crate::algos::BfsTree;
use crate::error::{Error, Result};
use crate::sketch::{NodeAttrs, B_ISOLATED, B_SINK, B_SOURCE, ROOT};

/// Final placement of all `n` nodes. Nodes without out-edges (including
/// isolated ones) come first in id order, then the active nodes in their
/// computed order, then nodes without in-edges in id order. The removed
/// nodes hang off the root.
pub fn reset(attrs: &NodeAttrs, n_active: u32) -> Result<BfsTree> {
    let n = attrs.n();
    let front = attrs.b.iter().filter(|&&b| b == B_SINK || b == B_ISOLATED).count() as u32;
    let mut b = vec![0u32; n];
    let mut p = vec![ROOT; n];
    let mut seen = vec![false; n_active as usize + 1];
    let mut next_front = 1u32;
    let mut next_back = front + n_active + 1;
    for v in 0..n {
        match attrs.b[v] {
            B_SINK | B_ISOLATED => {
                b[v] = next_front;
                next_front += 1;
            }
            B_SOURCE => {
                b[v] = next_back;
                next_back += 1;
            }
            x => {
                if x == 0 || x > n_active || std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::Inconsistent(format!("active node {v} has order {x}")));
                }
                b[v] = x + front;
                p[v] = attrs.p[v];
            }
        }
    }
    if next_back as usize != n + 1 {
        return Err(Error::Inconsistent(format!(
            "{} active nodes expected, {} found",
            n_active,
            n as u32 - (next_front - 1) - (next_back - front - n_active - 1)
        )));
    }
    Ok(BfsTree { b, p })
}
