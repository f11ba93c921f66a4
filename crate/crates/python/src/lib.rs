//! Python module `semibfs`: graph generation, the three tree algorithms and
//! the validator.

use std::path::PathBuf;
use std::time::Duration;

use engine::algos::{self, Algo, RunOptions};
use engine::graphio::{self, GraphFile, IoMeter};
use engine::oracle::{self, InMemGraph};
use engine::Error;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Format { .. } => PyIOError::new_err(e.to_string()),
        Error::InvalidParameter(_) | Error::IdOutOfRange { .. } | Error::MalformedTree(_) | Error::TooLarge(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Order `b` (1-based) and parent `p` (`None` for children of the root)
/// per node.
#[pyclass(name = "BfsTree", module = "semibfs", skip_from_py_object)]
#[derive(Clone)]
struct PyBfsTree(algos::BfsTree);

#[pymethods]
impl PyBfsTree {
    #[new]
    fn new(b: Vec<u32>, p: Vec<Option<u32>>) -> PyResult<Self> {
        if b.len() != p.len() {
            return Err(PyValueError::new_err("b and p differ in length"));
        }
        let p = p.into_iter().map(|x| x.unwrap_or(engine::sketch::ROOT)).collect();
        Ok(PyBfsTree(algos::BfsTree { b, p }))
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        algos::BfsTree::read(path, &IoMeter::new()).map(PyBfsTree).map_err(err)
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        self.0.write(path, &IoMeter::new()).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn b(&self) -> Vec<u32> {
        self.0.b.clone()
    }

    #[getter]
    fn p(&self) -> Vec<Option<u32>> {
        self.0
            .p
            .iter()
            .map(|&x| (x != engine::sketch::ROOT).then_some(x))
            .collect()
    }

    fn root_children(&self) -> Vec<u32> {
        self.0.root_children()
    }

    fn tree_edges(&self) -> Vec<(u32, u32)> {
        self.0.tree_edges().collect()
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("BfsTree(n={})", self.0.n())
    }
}

/// Writes a uniform random simple digraph; returns the edge count.
#[pyfunction]
#[pyo3(signature = (path, n, m, seed = 1))]
fn generate(py: Python<'_>, path: PathBuf, n: u64, m: u64, seed: u64) -> PyResult<u64> {
    py.detach(|| graphio::generate_er(path, n, m, seed, &IoMeter::new()))
        .map(|g| g.m())
        .map_err(err)
}

/// Keeps each edge of `graph` with probability `p`; returns the edge count.
#[pyfunction]
#[pyo3(signature = (graph, p, out, seed = 1))]
fn subsample(py: Python<'_>, graph: PathBuf, p: f64, out: PathBuf, seed: u64) -> PyResult<u64> {
    py.detach(|| {
        let meter = IoMeter::new();
        let g = GraphFile::open(graph, &meter)?;
        graphio::subsample(&g, p, seed, out, &meter)
    })
    .map(|g| g.m())
    .map_err(err)
}

/// Runs one algorithm on a graph file. Returns the tree and a dict of run
/// counters, bytes moved and wall time.
#[pyfunction]
#[pyo3(signature = (graph, algo = "ep", k = 1.0, gamma = 0.08, watchdog = None, time_limit = None, scratch = None))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    graph: PathBuf,
    algo: &str,
    k: f64,
    gamma: f64,
    watchdog: Option<u64>,
    time_limit: Option<f64>,
    scratch: Option<PathBuf>,
) -> PyResult<(PyBfsTree, Bound<'py, PyDict>)> {
    let algo: Algo = algo.parse().map_err(err)?;
    let time_limit = match time_limit {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(PyValueError::new_err("time_limit must be positive")),
        t => t.map(Duration::from_secs_f64),
    };
    let opts = RunOptions {
        k,
        gamma,
        watchdog,
        time_limit,
        scratch,
    };
    let meter = IoMeter::new();
    let start = std::time::Instant::now();
    let out = py
        .detach(|| {
            let g = GraphFile::open(&graph, &meter)?;
            algos::run(algo, &g, &opts, &meter)
        })
        .map_err(err)?;
    let wall = start.elapsed().as_secs_f64();
    let io = meter.snapshot();
    let s = &out.stats;
    let d = PyDict::new(py);
    d.set_item("algo", algo.name())?;
    d.set_item("wall_time_s", wall)?;
    d.set_item("bytes_read", io.bytes_read)?;
    d.set_item("bytes_written", io.bytes_written)?;
    d.set_item("dt_bytes", io.bytes_read + io.bytes_written)?;
    d.set_item("outer_iterations", s.outer_iterations)?;
    d.set_item("restructuring_passes", s.restructuring_passes)?;
    d.set_item("imp_invocations", s.imp_invocations)?;
    d.set_item("peak_in_memory_edges", s.peak_in_memory_edges)?;
    d.set_item("edge_budget", s.edge_budget)?;
    for (key, v) in &s.extra {
        d.set_item(key, v)?;
    }
    Ok((PyBfsTree(out.tree), d))
}

/// Checks `tree` against `graph`. Returns `(valid, violating_edges)`;
/// structurally broken trees raise `ValueError`.
#[pyfunction]
fn verify(py: Python<'_>, graph: PathBuf, tree: &PyBfsTree) -> PyResult<(bool, u64)> {
    let t = &tree.0;
    py.detach(|| {
        let meter = IoMeter::new();
        let g = GraphFile::open(graph, &meter)?;
        oracle::validate_bfs_tree(&g, t, &meter)
    })
    .map(|v| (v.is_valid(), v.total))
    .map_err(err)
}

/// In-memory BFS tree of an edge list, restarting from unvisited nodes in
/// id order.
#[pyfunction]
fn reference_bfs(n: usize, edges: Vec<(u32, u32)>) -> PyResult<PyBfsTree> {
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u as usize >= n || v as usize >= n) {
        return Err(PyValueError::new_err(format!(
            "edge ({u}, {v}) out of range for {n} nodes"
        )));
    }
    let order: Vec<u32> = (0..n as u32).collect();
    Ok(PyBfsTree(oracle::reference_bfs(
        &InMemGraph::from_edges(n, &edges),
        &order,
    )))
}

#[pymodule]
fn semibfs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBfsTree>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(subsample, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reference_bfs, m)?)?;
    Ok(())
}
