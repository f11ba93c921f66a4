//! Binary graph files, byte accounting, partitioning and dataset generators.

mod degrees;
mod format;
mod generate;
mod meter;
mod partition;

pub use degrees::{compute_degrees, DegreeTable};
pub use format::{
    write_edge_file, EdgeReader, EdgeWriter, GraphFile, GraphHeader, IdWidth, FORMAT_VERSION, HEADER_LEN, MAGIC,
};
pub use generate::{generate_er, subsample, ER_MAX_EDGES};
pub use meter::{CountingReader, CountingWriter, IoMeter, IoSnapshot};
pub use partition::{edge_capacity, partition_count, scan_g, MergeReader, Partition, ScanOutput};

use crate::error::{Error, Result};

/// Largest node count the in-memory arrays support. Node ids, positions and
/// the setup-time sentinel `n + 1 + id` must all fit in a `u32` below the
/// reserved markers.
pub const MAX_NODES: u64 = (u32::MAX as u64 - 4) / 2;

pub fn check_node_count(n: u64) -> Result<usize> {
    if n > MAX_NODES {
        return Err(Error::TooLarge(format!(
            "{n} nodes exceeds the supported maximum of {MAX_NODES}"
        )));
    }
    Ok(n as usize)
}
