use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graphio::{CountingReader, CountingWriter, IoMeter};

/// `(parent, child, sibling rank)`, three little-endian `u32`s, no header.
pub const EVICTED_RECORD_BYTES: usize = 12;

/// Append-only disk log of tree edges pruned from memory.
pub struct EvictedEdges {
    path: PathBuf,
    out: BufWriter<CountingWriter<File>>,
    len: u64,
}

impl EvictedEdges {
    pub fn create(path: impl AsRef<Path>, meter: &IoMeter) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path)?;
        Ok(EvictedEdges {
            path,
            out: BufWriter::with_capacity(1 << 16, CountingWriter::new(file, meter.clone())),
            len: 0,
        })
    }

    pub fn append(&mut self, parent: u32, child: u32, rank: u32) -> Result<()> {
        let mut rec = [0u8; EVICTED_RECORD_BYTES];
        rec[0..4].copy_from_slice(&parent.to_le_bytes());
        rec[4..8].copy_from_slice(&child.to_le_bytes());
        rec[8..12].copy_from_slice(&rank.to_le_bytes());
        self.out.write_all(&rec)?;
        self.len += 1;
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Reads a whole log back.
pub fn read_evicted(path: impl AsRef<Path>, meter: &IoMeter) -> Result<Vec<(u32, u32, u32)>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    CountingReader::new(File::open(path)?, meter.clone()).read_to_end(&mut bytes)?;
    if bytes.len() % EVICTED_RECORD_BYTES != 0 {
        return Err(Error::format(
            path,
            "evicted-edge log length is not a whole number of records",
        ));
    }
    Ok(bytes
        .chunks_exact(EVICTED_RECORD_BYTES)
        .map(|r| {
            let w = |i: usize| u32::from_le_bytes(r[i..i + 4].try_into().unwrap());
            (w(0), w(4), w(8))
        })
        .collect())
}
