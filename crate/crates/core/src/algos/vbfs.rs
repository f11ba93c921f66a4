use crate::sketch::{NodeAttrs, ROOT};

/// Whether `(u, v)` shows the tree is not a BFS tree: `u` comes before `v`
/// and before `v`'s parent, yet `v` hangs elsewhere. A root parent counts as
/// later than everything here, since a restart node reachable from an
/// already visited node should have been enqueued by it.
#[inline]
pub fn is_vbfs_in(b: &[u32], p: &[u32], u: u32, v: u32) -> bool {
    let pv = p[v as usize];
    if pv == u {
        return false;
    }
    let bu = b[u as usize];
    bu < b[v as usize] && (pv == ROOT || bu < b[pv as usize])
}

#[inline]
pub fn is_vbfs_edge(u: u32, v: u32, attrs: &NodeAttrs) -> bool {
    is_vbfs_in(&attrs.b, &attrs.p, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_edge_is_never_violating() {
        let attrs = NodeAttrs {
            b: vec![1, 2],
            p: vec![ROOT, 0],
        };
        assert!(!is_vbfs_edge(0, 1, &attrs));
    }

    #[test]
    fn later_source_is_not_violating() {
        let attrs = NodeAttrs {
            b: vec![5, 2],
            p: vec![ROOT, ROOT],
        };
        assert!(!is_vbfs_edge(0, 1, &attrs));
    }

    #[test]
    fn chain_shortcut_is_violating() {
        // r -> 1 -> 2 -> 3 with orders 1, 2, 3 (node 0 unused at the end)
        let attrs = NodeAttrs {
            b: vec![4, 1, 2, 3],
            p: vec![ROOT, ROOT, 1, 2],
        };
        assert!(is_vbfs_edge(1, 3, &attrs));
        assert!(!is_vbfs_edge(2, 3, &attrs));
        assert!(!is_vbfs_edge(3, 1, &attrs));
    }

    #[test]
    fn reachable_restart_node_is_violating() {
        let attrs = NodeAttrs::star(3);
        assert!(is_vbfs_edge(0, 2, &attrs));
        assert!(!is_vbfs_edge(2, 0, &attrs));
    }
}
