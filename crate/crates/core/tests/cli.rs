use std::path::Path;
use std::process::{Command, Output};

fn semibfs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semibfs")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> Option<String> {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    for f in [&a, &b] {
        let o = semibfs(&["generate", "--n", "1e4", "--m", "2e5", "--seed", "7", "--out", p(f)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(value(&stdout(&o), "m").as_deref(), Some("200000"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn two_node_graph_is_unique() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    assert!(semibfs(&["generate", "--n", "2", "--m", "2", "--out", p(&g)])
        .status
        .success());
    let meter = semibfs::graphio::IoMeter::new();
    let mut edges = semibfs::graphio::GraphFile::open(&g, &meter)
        .unwrap()
        .read_all(&meter)
        .unwrap();
    edges.sort();
    assert_eq!(edges, vec![(0, 1), (1, 0)]);
    let o = semibfs(&["generate", "--n", "2", "--m", "3", "--out", p(&g)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ep_on_edgeless_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    assert!(semibfs(&["generate", "--n", "10", "--m", "0", "--out", p(&g)])
        .status
        .success());
    let o = semibfs(&["run", p(&g), "--algo", "ep"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "outer_iterations").as_deref(), Some("0"));
    assert_eq!(value(&out, "valid").as_deref(), Some("true"));
    assert!(value(&out, "dt_bytes").is_some());
}

#[test]
fn run_then_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    let t = dir.path().join("t.bin");
    let metrics = dir.path().join("metrics.txt");
    assert!(
        semibfs(&["generate", "--n", "1e4", "--m", "5e4", "--seed", "3", "--out", p(&g)])
            .status
            .success()
    );
    let o = semibfs(&[
        "run",
        p(&g),
        "--algo",
        "ep",
        "--k",
        "1",
        "--out",
        p(&t),
        "--metrics",
        p(&metrics),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = std::fs::read_to_string(&metrics).unwrap();
    let peak: u64 = value(&m, "peak_in_memory_edges").unwrap().parse().unwrap();
    let budget: u64 = value(&m, "edge_budget").unwrap().parse().unwrap();
    assert!(peak <= budget);
    assert_eq!(budget, 20_000);

    let o = semibfs(&["verify", p(&g), p(&t)]);
    assert_eq!(o.status.code(), Some(0));

    // move a node with a parent up to the root: its in-edge from the old
    // parent now violates
    let meter = semibfs::graphio::IoMeter::new();
    let mut tree = semibfs::algos::BfsTree::read(&t, &meter).unwrap();
    let v = tree.p.iter().position(|&x| x != semibfs::sketch::ROOT).unwrap();
    let bad = dir.path().join("bad.bin");
    tree.p[v] = semibfs::sketch::ROOT;
    tree.write(&bad, &meter).unwrap();
    assert_eq!(semibfs(&["verify", p(&g), p(&bad)]).status.code(), Some(2));

    let small = dir.path().join("small.bin");
    assert!(semibfs(&["generate", "--n", "5", "--m", "3", "--out", p(&small)])
        .status
        .success());
    let o = semibfs(&["verify", p(&small), p(&t)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed tree"));
}

#[test]
fn run_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    assert!(semibfs(&[
        "generate",
        "--n",
        "2000",
        "--m",
        "10000",
        "--seed",
        "11",
        "--out",
        p(&g)
    ])
    .status
    .success());
    for algo in ["ee", "eb", "ep"] {
        let a = dir.path().join(format!("{algo}-a.bin"));
        let b = dir.path().join(format!("{algo}-b.bin"));
        assert!(semibfs(&["run", p(&g), "--algo", algo, "--k", "0.5", "--out", p(&a)])
            .status
            .success());
        assert!(semibfs(&["run", p(&g), "--algo", algo, "--k", "0.5", "--out", p(&b)])
            .status
            .success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{algo}");
    }
}

#[test]
fn watchdog_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    // a long path written back to front needs many passes
    let edges: Vec<(u64, u64)> = (0..199u64).rev().map(|u| (u, u + 1)).collect();
    semibfs::graphio::write_edge_file(
        &g,
        200,
        semibfs::graphio::IdWidth::U32,
        edges,
        &semibfs::graphio::IoMeter::new(),
    )
    .unwrap();
    let o = semibfs(&["run", p(&g), "--algo", "ee", "--watchdog", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_graph_is_an_io_error() {
    let o = semibfs(&["run", "/nonexistent/graph.bin"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn subsample_and_scratch_env() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.bin");
    let s = dir.path().join("s.bin");
    assert!(semibfs(&["generate", "--n", "1000", "--m", "20000", "--out", p(&g)])
        .status
        .success());
    let o = semibfs(&["subsample", p(&g), "--p", "1", "--out", p(&s)]);
    assert_eq!(value(&stdout(&o), "m").as_deref(), Some("20000"));
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&s).unwrap());

    let scratch = dir.path().join("scratch");
    let o = Command::new(env!("CARGO_BIN_EXE_semibfs"))
        .args(["run", p(&g), "--algo", "ep"])
        .env("SEMIBFS_SCRATCH", &scratch)
        .output()
        .unwrap();
    assert!(o.status.success());
    // the scratch dir was created and cleaned up after the run
    assert!(scratch.is_dir());
    assert_eq!(std::fs::read_dir(&scratch).unwrap().count(), 0);
}

#[test]
fn bench_empty_and_small() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let o = semibfs(&["bench", p(&empty)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);

    let cfg = dir.path().join("d.toml");
    std::fs::write(
        &cfg,
        "[[sweep]]\nname = \"degree\"\nalgos = [\"ep\"]\nn = [2000]\nd = [1, 3, 5, 10]\n",
    )
    .unwrap();
    let o = semibfs(&["bench", p(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|&h| h == "dt_bytes").unwrap();
    let dts: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect();
    assert_eq!(dts.len(), 4);
    assert!(dts.windows(2).all(|w| w[0] <= w[1]), "{dts:?}");
    assert!(text.lines().skip(1).all(|l| l.ends_with(",yes")));
}
