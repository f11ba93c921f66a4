//! Partitioned BFS: one sorting scan, a setup pass that builds the first
//! tree, then repeated passes over a shrinking scan list while a growing
//! prefix of the order is frozen and evicted from memory.

mod reduce;
mod reset;
mod thresholds;

pub use reduce::ep_reduce;
pub use reset::reset;
pub use thresholds::{enlarge, er_prune, find, EdgeLists, ErPruneOutcome, Thresholds, UNSET};

use super::vbfs::is_vbfs_edge;
use super::{check_k, Guard, RunOptions, RunOutput, RunStats};
use crate::error::{Error, Result};
use crate::graphio::{check_node_count, edge_capacity, scan_g, EdgeWriter, GraphFile, IdWidth, IoMeter, MergeReader};
use crate::sketch::{prefetch, BonArray, EvictedEdges, NodeAttrs, Sketch, B_ISOLATED, B_SINK, B_SOURCE, ROOT};

pub fn ep_bfs(g: &GraphFile, opts: &RunOptions, meter: &IoMeter) -> Result<RunOutput> {
    check_k(opts.k)?;
    if !(opts.gamma > 0.0 && opts.gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1), got {}",
            opts.gamma
        )));
    }
    let n = check_node_count(g.n())?;
    let m = g.m();
    let guard = Guard::new(opts, n as u64);
    let capacity = edge_capacity(n as u64, opts.k);
    let scratch = opts.scratch_dir("semibfs-ep-")?;
    let dir = scratch.path();
    let mut stats = RunStats {
        edge_budget: capacity,
        ..RunStats::default()
    };

    // sort into partitions, counting degrees on the way
    let scan = scan_g(g, opts.k, capacity, dir, meter)?;
    let deg = scan.degrees;
    let active = |v: usize| deg.indeg[v] > 0 && deg.outdeg[v] > 0;
    let n_active = (0..n).filter(|&v| active(v)).count() as u32;

    let mut attrs = NodeAttrs::unordered(n);
    let mut sketch = Sketch::new(n, capacity as usize);
    let mut bon = BonArray::new(n_active as usize);
    for (i, v) in (0..n).filter(|&v| active(v)).enumerate() {
        sketch.insert_rightmost_child(ROOT, v as u32)?;
        bon.set(i as u32 + 1, v as u32);
    }

    // setup pass: route every edge, stage the active ones and restructure
    // whenever the sketch fills up
    let mut e_r = EdgeWriter::create(dir.join("er-0000.bin"), n as u64, IdWidth::U32, meter)?;
    let mut e_i = EdgeWriter::create(dir.join("ei.bin"), n as u64, IdWidth::U32, meter)?;
    let mut e_o = EdgeWriter::create(dir.join("eo.bin"), n as u64, IdWidth::U32, meter)?;
    let mut setup_reduces = 0u64;
    {
        let mut merge = MergeReader::new(&scan.partitions, n as u64, meter)?;
        let (mut vu, mut sinks) = (Vec::new(), Vec::new());
        while let Some(u) = merge.next_source(&deg, &mut vu, &mut sinks)? {
            for &v in &sinks {
                e_o.push(u64::from(u), u64::from(v))?;
            }
            if deg.indeg[u as usize] == 0 {
                for &v in &vu {
                    e_i.push(u64::from(u), u64::from(v))?;
                }
                continue;
            }
            for &v in &vu {
                e_r.push(u64::from(u), u64::from(v))?;
                sketch.stage_edge(u, v)?;
                if sketch.is_full() {
                    ep_reduce(&mut sketch, &mut attrs, &mut bon, 0, 0, n_active)?;
                    setup_reduces += 1;
                    guard.time()?;
                }
            }
        }
    }
    for p in &scan.partitions {
        let _ = std::fs::remove_file(p.file.path());
    }
    // the final setup restructure roots the forest and fixes B, P and BON
    ep_reduce(&mut sketch, &mut attrs, &mut bon, 0, 0, n_active)?;
    setup_reduces += 1;
    for v in 0..n {
        attrs.b[v] = match (deg.indeg[v] > 0, deg.outdeg[v] > 0) {
            (true, true) => continue,
            (false, false) => B_ISOLATED,
            (_, false) => B_SINK,
            (false, true) => B_SOURCE,
        };
    }
    stats.mem("degrees", deg.memory_bytes(), true);
    stats.mem("scan_sort_buffer", scan.sort_buffer_bytes, true);
    drop(deg);

    let mut lists = EdgeLists::new(dir, n as u64, e_r.finish()?, e_i.finish()?, e_o.finish()?);
    let setup_scan_edges = lists.e_r.m();
    let mut evicted = EvictedEdges::create(dir.join("evicted.bin"), meter)?;
    let mut th = Thresholds::default();
    let mut imp = setup_reduces;
    let (mut rebuilds, mut discarded, mut main_flushes) = (0u64, 0u64, 0u64);

    while th.f_r < n_active {
        stats.outer_iterations += 1;
        guard.pass(stats.outer_iterations)?;
        th.begin_pass();
        let mut r = lists.e_r.edges(meter)?;
        while let Some((u, v)) = r.next_pair()? {
            if let Some(w) = r.peek_dst(16) {
                if let Some(x) = attrs.b.get(w as usize) {
                    prefetch(x);
                }
            }
            let bu = attrs.b[u as usize];
            let bv = attrs.b[v as usize];
            if bu <= th.f_r || bv <= th.f_c {
                continue;
            }
            if let Some(next) = lists.e_next.as_mut() {
                enlarge(next, u, v, &attrs, th.f_c, th.f_cc)?;
            }
            let fi = th.current();
            // a tree edge never needs staging or violates; compare the orders
            // first, they are already loaded
            if fi <= bu {
                if bv < fi || attrs.p[v as usize] == u {
                    continue;
                }
                sketch.stage_edge(u, v)?;
            } else if bu < bv && is_vbfs_edge(u, v, &attrs) {
                th.lower(bu);
                sketch.stage_edge(u, v)?;
            } else {
                continue;
            }
            if sketch.is_full() {
                ep_reduce(&mut sketch, &mut attrs, &mut bon, th.f_r, th.f_c, n_active)?;
                imp += 1;
                main_flushes += 1;
                th.after_flush();
                guard.time()?;
            }
        }
        if sketch.staged_count() > 0 {
            ep_reduce(&mut sketch, &mut attrs, &mut bon, th.f_r, th.f_c, n_active)?;
            imp += 1;
        }
        if th.quiet() {
            break;
        }
        stats.restructuring_passes += 1;
        let alpha = th.advance(th.min_f(), &sketch, &attrs, &bon, n_active);
        for pos in alpha + 1..=th.f_r {
            sketch.v_prune(bon.get(pos), &mut evicted)?;
        }
        let o = er_prune(&mut th, &mut lists, n as u64, m, opts.gamma, meter)?;
        rebuilds += u64::from(o.replaced);
        discarded += u64::from(o.discarded);
    }
    evicted.flush()?;

    let tree = reset(&attrs, n_active)?;
    stats.imp_invocations = imp;
    stats.peak_in_memory_edges = sketch.peak_edges() as u64;
    stats.mem("attrs", attrs.memory_bytes(), false);
    stats.mem("bon", bon.memory_bytes(), false);
    stats.mem("sketch", sketch.memory_bytes(), false);
    stats.extra = vec![
        ("nodes_active".into(), u64::from(n_active)),
        ("partitions".into(), scan.partitions.len() as u64),
        ("setup_reduces".into(), setup_reduces),
        ("main_flushes".into(), main_flushes),
        ("scan_list_edges_initial".into(), setup_scan_edges),
        ("scan_list_edges_final".into(), lists.e_r.m()),
        ("scan_list_rebuilds".into(), rebuilds),
        ("scan_list_discards".into(), discarded),
        ("source_edges".into(), lists.e_i.m()),
        ("sink_edges".into(), lists.e_o.m()),
        ("evicted_tree_edges".into(), evicted.len()),
        ("final_f_r".into(), u64::from(th.f_r)),
    ];
    Ok(RunOutput { tree, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algos::im_bfs;
    use crate::graphio::write_edge_file;
    use crate::oracle::validate_bfs_tree;

    fn graph(dir: &std::path::Path, n: u64, edges: &[(u64, u64)], meter: &IoMeter) -> GraphFile {
        write_edge_file(dir.join("g.bin"), n, IdWidth::U32, edges.iter().copied(), meter).unwrap()
    }

    #[test]
    fn edgeless_graph_needs_no_main_pass() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let g = graph(dir.path(), 10, &[], &meter);
        let out = ep_bfs(&g, &RunOptions::default(), &meter).unwrap();
        assert_eq!(out.stats.outer_iterations, 0);
        assert_eq!(out.tree.b, (1..=10).collect::<Vec<_>>());
        assert_eq!(out.tree.p, vec![ROOT; 10]);
    }

    #[test]
    fn path_keeps_its_order() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let edges: Vec<_> = (0..9u64).rev().map(|u| (u, u + 1)).collect();
        let g = graph(dir.path(), 10, &edges, &meter);
        let out = ep_bfs(&g, &RunOptions::default().with_k(0.05), &meter).unwrap();
        assert!(validate_bfs_tree(&g, &out.tree, &meter).unwrap().is_valid());
        // 9 is the only sink and 0 the only source
        assert_eq!(out.tree.b[9], 1);
        assert_eq!(out.tree.b[0], 10);
        assert_eq!(out.stats.extra("nodes_active"), Some(8));
    }

    #[test]
    fn reduce_from_star_matches_im_bfs() {
        let mut sketch = Sketch::new(3, 10);
        let mut attrs = NodeAttrs::unordered(3);
        let mut bon = BonArray::new(3);
        for v in 0..3 {
            sketch.insert_rightmost_child(ROOT, v).unwrap();
        }
        sketch.stage_edge(0, 2).unwrap();
        sketch.stage_edge(0, 1).unwrap();
        assert_eq!(ep_reduce(&mut sketch, &mut attrs, &mut bon, 0, 0, 3).unwrap(), 3);
        let want = im_bfs(&NodeAttrs::star(3), &[(0, 2), (0, 1)]).unwrap();
        assert_eq!(attrs, want);
        assert_eq!(bon.as_slice(), [0, 2, 1]);
        assert_eq!(sketch.staged_count(), 0);
        assert_eq!(sketch.tree_edge_count(), 2);
    }

    #[test]
    fn reset_places_removed_nodes_around_the_active_block() {
        // 0 source, 1 and 3 active (3 -> 1), 2 sink, 4 isolated
        let attrs = NodeAttrs {
            b: vec![B_SOURCE, 2, B_SINK, 1, B_ISOLATED],
            p: vec![ROOT, 3, ROOT, ROOT, ROOT],
        };
        let t = reset(&attrs, 2).unwrap();
        assert_eq!(t.b, vec![5, 4, 1, 3, 2]);
        assert_eq!(t.p, vec![ROOT, 3, ROOT, ROOT, ROOT]);
        let dup = NodeAttrs {
            b: vec![1, 1],
            p: vec![ROOT, ROOT],
        };
        assert!(reset(&dup, 2).is_err());
    }

    #[test]
    fn find_stops_at_the_last_parent() {
        // chain 0 -> 1, leaf 2; positions 1, 2, 3
        let mut sketch = Sketch::new(3, 10);
        let mut attrs = NodeAttrs::unordered(3);
        let mut bon = BonArray::new(3);
        for v in 0..3 {
            sketch.insert_rightmost_child(ROOT, v).unwrap();
        }
        sketch.stage_edge(0, 1).unwrap();
        ep_reduce(&mut sketch, &mut attrs, &mut bon, 0, 0, 3).unwrap();
        assert_eq!(attrs.b, vec![1, 2, 3]);
        assert_eq!(find(0, 3, &sketch, &attrs, &bon, 3), 2);
        assert_eq!(find(1, 3, &sketch, &attrs, &bon, 3), 3);
        assert_eq!(find(0, 0, &sketch, &attrs, &bon, 3), 0);
        assert_eq!(find(0, 99, &sketch, &attrs, &bon, 3), 2);
    }

    #[test]
    fn enlarge_and_prune_boundaries() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let attrs = NodeAttrs {
            b: vec![1, 2, 3],
            p: vec![ROOT, 0, 1],
        };
        let mut w = EdgeWriter::create(dir.path().join("next.bin"), 3, IdWidth::U32, &meter).unwrap();
        assert!(!enlarge(&mut w, 0, 2, &attrs, 1, 1).unwrap());
        assert!(!enlarge(&mut w, 1, 2, &attrs, 1, 3).unwrap());
        assert!(enlarge(&mut w, 1, 2, &attrs, 1, 2).unwrap());
        assert_eq!(w.len(), 1);

        let mk = |name: &str| write_edge_file(dir.path().join(name), 3, IdWidth::U32, [], &meter).unwrap();
        let mut lists = EdgeLists::new(dir.path(), 3, mk("r"), mk("i"), mk("o"));
        // n = 100, m = 1000, gamma = 0.1: first limit is 10 past base 1
        let mut th = Thresholds {
            f_c: 11,
            ..Thresholds::default()
        };
        assert!(!er_prune(&mut th, &mut lists, 100, 1000, 0.1, &meter).unwrap().opened);
        th.f_c = 12;
        let o = er_prune(&mut th, &mut lists, 100, 1000, 0.1, &meter).unwrap();
        assert!(o.opened && !o.replaced);
        assert_eq!((th.base, th.t, lists.collect_fc), (12, 1, 12));
        // f_r has not reached the collecting f_c: the list is dropped
        th.f_r = 11;
        let o = er_prune(&mut th, &mut lists, 100, 1000, 0.1, &meter).unwrap();
        assert!(o.discarded && !o.replaced && !o.opened);
        // next limit is 100 past base
        th.f_c = 113;
        assert!(er_prune(&mut th, &mut lists, 100, 1000, 0.1, &meter).unwrap().opened);
        th.f_r = 113;
        assert!(er_prune(&mut th, &mut lists, 100, 1000, 0.1, &meter).unwrap().replaced);
    }
}
