use super::check_node_count;
use super::format::GraphFile;
use super::meter::IoMeter;
use crate::error::{Error, Result};

/// In- and out-degree of every node. Only lives through the setup phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeTable {
    pub indeg: Vec<u32>,
    pub outdeg: Vec<u32>,
}

impl DegreeTable {
    pub fn new(n: usize) -> Self {
        DegreeTable {
            indeg: vec![0; n],
            outdeg: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.indeg.len()
    }

    #[inline]
    pub(crate) fn record(&mut self, u: usize, v: usize) -> Result<()> {
        let overflow = || Error::TooLarge("node degree exceeds u32".into());
        self.outdeg[u] = self.outdeg[u].checked_add(1).ok_or_else(overflow)?;
        self.indeg[v] = self.indeg[v].checked_add(1).ok_or_else(overflow)?;
        Ok(())
    }

    pub fn total_in(&self) -> u64 {
        self.indeg.iter().map(|&d| u64::from(d)).sum()
    }

    pub fn total_out(&self) -> u64 {
        self.outdeg.iter().map(|&d| u64::from(d)).sum()
    }

    /// Bytes held by the two arrays.
    pub fn memory_bytes(&self) -> u64 {
        8 * self.indeg.len() as u64
    }
}

/// One sequential pass over `g`.
pub fn compute_degrees(g: &GraphFile, meter: &IoMeter) -> Result<DegreeTable> {
    let n = check_node_count(g.n())?;
    let mut deg = DegreeTable::new(n);
    let mut reader = g.edges(meter)?;
    while let Some((u, v)) = reader.next_edge()? {
        deg.record(u as usize, v as usize)?;
    }
    Ok(deg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphio::{generate_er, write_edge_file, IdWidth};

    #[test]
    fn empty_graph_has_zero_degrees() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let g = write_edge_file(dir.path().join("g"), 4, IdWidth::U32, [], &meter).unwrap();
        let d = compute_degrees(&g, &meter).unwrap();
        assert_eq!(d, DegreeTable::new(4));
    }

    #[test]
    fn path_degrees() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let g = write_edge_file(dir.path().join("g"), 3, IdWidth::U32, [(0, 1), (1, 2)], &meter).unwrap();
        let d = compute_degrees(&g, &meter).unwrap();
        assert_eq!(d.indeg, vec![0, 1, 1]);
        assert_eq!(d.outdeg, vec![1, 1, 0]);
    }

    #[test]
    fn degree_sums_match_edge_count() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let g = generate_er(dir.path().join("er"), 1000, 5000, 3, &meter).unwrap();
        let before = meter.bytes_read();
        let d = compute_degrees(&g, &meter).unwrap();
        assert_eq!(d.total_in(), 5000);
        assert_eq!(d.total_out(), 5000);
        // exactly one pass over the file
        assert_eq!(meter.bytes_read() - before, g.header().file_bytes());
    }
}
