//! The output tree and its file format.
//!
//! Layout, little-endian: magic `SXBFSTRE` (8 bytes), version `u32` (1), id
//! width `u32` (4), `n` as `u64`, then `n` order values and `n` parents as
//! `u32`. A root parent is `0xFFFFFFFF`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graphio::{CountingReader, CountingWriter, IoMeter};
use crate::sketch::{NodeAttrs, ROOT};

pub const TREE_MAGIC: [u8; 8] = *b"SXBFSTRE";
pub const TREE_HEADER_LEN: u64 = 24;
const TREE_VERSION: u32 = 1;

/// Breadth-first order `b` (a permutation of `1..=n`) and parent `p` of
/// every node, the dummy root being [`ROOT`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BfsTree {
    pub b: Vec<u32>,
    pub p: Vec<u32>,
}

impl From<NodeAttrs> for BfsTree {
    fn from(a: NodeAttrs) -> Self {
        BfsTree { b: a.b, p: a.p }
    }
}

impl BfsTree {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Children of the root, ordered by `b`.
    pub fn root_children(&self) -> Vec<u32> {
        let mut r: Vec<u32> = (0..self.n() as u32).filter(|&v| self.p[v as usize] == ROOT).collect();
        r.sort_by_key(|&v| self.b[v as usize]);
        r
    }

    /// `(parent, child)` pairs of non-root edges, by child id.
    pub fn tree_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.p
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p != ROOT)
            .map(|(v, &p)| (p, v as u32))
    }

    pub fn write(&self, path: impl AsRef<Path>, meter: &IoMeter) -> Result<()> {
        let file = File::create(path)?;
        let mut w = BufWriter::with_capacity(1 << 20, CountingWriter::new(file, meter.clone()));
        w.write_all(&TREE_MAGIC)?;
        w.write_all(&TREE_VERSION.to_le_bytes())?;
        w.write_all(&4u32.to_le_bytes())?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        for &x in self.b.iter().chain(&self.p) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>, meter: &IoMeter) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        let mut r = BufReader::with_capacity(1 << 20, CountingReader::new(file, meter.clone()));
        let mut head = [0u8; TREE_HEADER_LEN as usize];
        r.read_exact(&mut head)
            .map_err(|_| Error::format(path, "truncated tree header"))?;
        if head[0..8] != TREE_MAGIC {
            return Err(Error::format(path, "not a tree file"));
        }
        let version = u32::from_le_bytes(head[8..12].try_into().unwrap());
        let width = u32::from_le_bytes(head[12..16].try_into().unwrap());
        if version != TREE_VERSION || width != 4 {
            return Err(Error::format(
                path,
                format!("unsupported tree version {version} / width {width}"),
            ));
        }
        let n = u64::from_le_bytes(head[16..24].try_into().unwrap());
        if TREE_HEADER_LEN + 8 * n != len {
            return Err(Error::format(
                path,
                format!("tree of {n} nodes but file has {len} bytes"),
            ));
        }
        let mut body = vec![0u8; 8 * n as usize];
        r.read_exact(&mut body)?;
        let words: Vec<u32> = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let (b, p) = words.split_at(n as usize);
        Ok(BfsTree {
            b: b.to_vec(),
            p: p.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let meter = IoMeter::new();
        let t = BfsTree {
            b: vec![2, 1, 3],
            p: vec![1, ROOT, 1],
        };
        let path = dir.path().join("t");
        t.write(&path, &meter).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), TREE_HEADER_LEN + 24);
        assert_eq!(BfsTree::read(&path, &meter).unwrap(), t);
        assert_eq!(t.root_children(), vec![1]);
        assert_eq!(t.tree_edges().collect::<Vec<_>>(), vec![(1, 0), (1, 2)]);
        std::fs::write(&path, b"nonsense").unwrap();
        assert!(BfsTree::read(&path, &meter).is_err());
    }
}
