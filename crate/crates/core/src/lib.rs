//! Breadth-first search trees of directed graphs that live on disk, computed
//! with memory for a spanning tree plus a bounded number of extra edges.
//!
//! Three algorithms are provided: [`algos::ee_bfs`] (restructure per edge),
//! [`algos::eb_bfs`] (restructure per batch) and [`algos::ep_bfs`] (partitioned,
//! with pruning of finalized prefixes). Output trees are checked with
//! [`oracle::validate_bfs_tree`].

pub mod algos;
pub mod cli;
pub mod error;
pub mod graphio;
pub mod oracle;
pub mod sketch;

pub use error::{Error, Result};
