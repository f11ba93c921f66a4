//! The on-disk edge list.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                          |
//! |--------|------|--------------------------------|
//! | 0      | 8    | magic `SXGRAPH\0`              |
//! | 8      | 2    | format version (1)             |
//! | 10     | 2    | id width in bytes (4 or 8)     |
//! | 12     | 4    | reserved, zero                 |
//! | 16     | 8    | node count `n`                 |
//! | 24     | 8    | edge count `m`                 |
//! | 32     | ...  | `m` records of `(src, dst)`    |
//!
//! Records are in arbitrary order. Partition files, scan lists and the
//! collected replacement lists use the same layout.

use std::fs::File;
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::meter::{CountingReader, CountingWriter, IoMeter};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"SXGRAPH\0";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: u64 = 32;
const M_OFFSET: u64 = 24;
const READ_BUF_BYTES: usize = 1 << 20;
const WRITE_BUF_BYTES: usize = 1 << 20;

/// Width of each node id in a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdWidth {
    #[default]
    U32,
    U64,
}

impl IdWidth {
    pub fn bytes(self) -> usize {
        match self {
            IdWidth::U32 => 4,
            IdWidth::U64 => 8,
        }
    }

    pub fn record_bytes(self) -> usize {
        2 * self.bytes()
    }

    pub fn from_bytes(bytes: u16) -> Option<Self> {
        match bytes {
            4 => Some(IdWidth::U32),
            8 => Some(IdWidth::U64),
            _ => None,
        }
    }

    /// Smallest width able to hold every id below `n`.
    pub fn for_nodes(n: u64) -> Self {
        if n <= u64::from(u32::MAX) {
            IdWidth::U32
        } else {
            IdWidth::U64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphHeader {
    pub id_width: IdWidth,
    pub n: u64,
    pub m: u64,
}

impl GraphHeader {
    fn encode(&self) -> [u8; HEADER_LEN as usize] {
        let mut buf = [0u8; HEADER_LEN as usize];
        buf[0..8].copy_from_slice(&MAGIC);
        buf[8..10].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf[10..12].copy_from_slice(&(self.id_width.bytes() as u16).to_le_bytes());
        buf[16..24].copy_from_slice(&self.n.to_le_bytes());
        buf[24..32].copy_from_slice(&self.m.to_le_bytes());
        buf
    }

    fn decode(path: &Path, buf: &[u8; HEADER_LEN as usize]) -> Result<Self> {
        if buf[0..8] != MAGIC {
            return Err(Error::format(path, "bad magic"));
        }
        let version = u16::from_le_bytes([buf[8], buf[9]]);
        if version != FORMAT_VERSION {
            return Err(Error::format(path, format!("unsupported version {version}")));
        }
        let width = u16::from_le_bytes([buf[10], buf[11]]);
        let id_width =
            IdWidth::from_bytes(width).ok_or_else(|| Error::format(path, format!("unsupported id width {width}")))?;
        let n = u64::from_le_bytes(buf[16..24].try_into().unwrap());
        let m = u64::from_le_bytes(buf[24..32].try_into().unwrap());
        Ok(GraphHeader { id_width, n, m })
    }

    pub fn payload_bytes(&self) -> u64 {
        self.m * self.id_width.record_bytes() as u64
    }

    pub fn file_bytes(&self) -> u64 {
        HEADER_LEN + self.payload_bytes()
    }
}

/// A validated, disk-resident edge list.
#[derive(Debug, Clone)]
pub struct GraphFile {
    path: PathBuf,
    header: GraphHeader,
}

impl GraphFile {
    /// Reads and checks the header. The header bytes are credited to `meter`.
    pub fn open(path: impl AsRef<Path>, meter: &IoMeter) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path)?;
        let len = file.metadata()?.len();
        let mut reader = CountingReader::new(file, meter.clone());
        let mut buf = [0u8; HEADER_LEN as usize];
        reader
            .read_exact(&mut buf)
            .map_err(|_| Error::format(&path, "truncated header"))?;
        let header = GraphHeader::decode(&path, &buf)?;
        if header.file_bytes() != len {
            return Err(Error::format(
                &path,
                format!(
                    "header declares {} records ({} bytes) but file has {} bytes",
                    header.m,
                    header.file_bytes(),
                    len
                ),
            ));
        }
        Ok(GraphFile { path, header })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn header(&self) -> GraphHeader {
        self.header
    }

    pub fn n(&self) -> u64 {
        self.header.n
    }

    pub fn m(&self) -> u64 {
        self.header.m
    }

    pub fn id_width(&self) -> IdWidth {
        self.header.id_width
    }

    pub fn payload_bytes(&self) -> u64 {
        self.header.payload_bytes()
    }

    /// Starts a sequential scan over the records.
    pub fn edges(&self, meter: &IoMeter) -> Result<EdgeReader> {
        EdgeReader::open(self, meter)
    }

    /// Reads every record into memory. Intended for small graphs and tests.
    pub fn read_all(&self, meter: &IoMeter) -> Result<Vec<(u64, u64)>> {
        let mut out = Vec::with_capacity(self.m() as usize);
        let mut reader = self.edges(meter)?;
        while let Some(e) = reader.next_edge()? {
            out.push(e);
        }
        Ok(out)
    }
}

/// Streaming record writer. The edge count in the header is patched by
/// [`EdgeWriter::finish`].
pub struct EdgeWriter {
    path: PathBuf,
    out: BufWriter<CountingWriter<File>>,
    n: u64,
    id_width: IdWidth,
    m: u64,
}

impl EdgeWriter {
    pub fn create(path: impl AsRef<Path>, n: u64, id_width: IdWidth, meter: &IoMeter) -> Result<Self> {
        if id_width == IdWidth::U32 && n > u64::from(u32::MAX) + 1 {
            return Err(Error::InvalidParameter(format!("{n} nodes do not fit 4-byte ids")));
        }
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path)?;
        let mut out = BufWriter::with_capacity(WRITE_BUF_BYTES, CountingWriter::new(file, meter.clone()));
        out.write_all(&GraphHeader { id_width, n, m: 0 }.encode())?;
        Ok(EdgeWriter {
            path,
            out,
            n,
            id_width,
            m: 0,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> u64 {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    #[inline]
    pub fn push(&mut self, src: u64, dst: u64) -> Result<()> {
        if src >= self.n {
            return Err(Error::IdOutOfRange { id: src, n: self.n });
        }
        if dst >= self.n {
            return Err(Error::IdOutOfRange { id: dst, n: self.n });
        }
        match self.id_width {
            IdWidth::U32 => {
                let mut rec = [0u8; 8];
                rec[..4].copy_from_slice(&(src as u32).to_le_bytes());
                rec[4..].copy_from_slice(&(dst as u32).to_le_bytes());
                self.out.write_all(&rec)?;
            }
            IdWidth::U64 => {
                let mut rec = [0u8; 16];
                rec[..8].copy_from_slice(&src.to_le_bytes());
                rec[8..].copy_from_slice(&dst.to_le_bytes());
                self.out.write_all(&rec)?;
            }
        }
        self.m += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<GraphFile> {
        let mut inner = self.out.into_inner().map_err(|e| e.into_error())?;
        inner.seek(SeekFrom::Start(M_OFFSET))?;
        inner.write_all(&self.m.to_le_bytes())?;
        inner.flush()?;
        Ok(GraphFile {
            path: self.path,
            header: GraphHeader {
                id_width: self.id_width,
                n: self.n,
                m: self.m,
            },
        })
    }
}

/// Sequential record reader with its own block buffer.
pub struct EdgeReader {
    path: PathBuf,
    inner: CountingReader<File>,
    buf: Vec<u8>,
    pos: usize,
    filled: usize,
    remaining: u64,
    n: u64,
    id_width: IdWidth,
}

impl EdgeReader {
    fn open(graph: &GraphFile, meter: &IoMeter) -> Result<Self> {
        let file = File::open(&graph.path)?;
        let mut inner = CountingReader::new(file, meter.clone());
        let mut head = [0u8; HEADER_LEN as usize];
        inner
            .read_exact(&mut head)
            .map_err(|_| Error::format(&graph.path, "truncated header"))?;
        let header = GraphHeader::decode(&graph.path, &head)?;
        if header != graph.header {
            return Err(Error::format(&graph.path, "file changed since it was opened"));
        }
        let rec = header.id_width.record_bytes();
        let cap = (READ_BUF_BYTES / rec) * rec;
        Ok(EdgeReader {
            path: graph.path.clone(),
            inner,
            buf: vec![0u8; cap],
            pos: 0,
            filled: 0,
            remaining: header.m,
            n: header.n,
            id_width: header.id_width,
        })
    }

    /// Records not yet returned.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    fn refill(&mut self) -> Result<()> {
        let rec = self.id_width.record_bytes();
        let want = (self.remaining.min((self.buf.len() / rec) as u64) as usize) * rec;
        let mut got = 0;
        while got < want {
            let k = self.inner.read(&mut self.buf[got..want])?;
            if k == 0 {
                return Err(Error::format(&self.path, "unexpected end of edge records"));
            }
            got += k;
        }
        self.pos = 0;
        self.filled = want;
        Ok(())
    }

    #[inline]
    pub fn next_edge(&mut self) -> Result<Option<(u64, u64)>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        if self.pos == self.filled {
            self.refill()?;
        }
        let b = &self.buf[self.pos..];
        let (src, dst) = match self.id_width {
            IdWidth::U32 => (
                u64::from(u32::from_le_bytes([b[0], b[1], b[2], b[3]])),
                u64::from(u32::from_le_bytes([b[4], b[5], b[6], b[7]])),
            ),
            IdWidth::U64 => (
                u64::from_le_bytes(b[0..8].try_into().unwrap()),
                u64::from_le_bytes(b[8..16].try_into().unwrap()),
            ),
        };
        self.pos += self.id_width.record_bytes();
        self.remaining -= 1;
        if src >= self.n {
            return Err(Error::IdOutOfRange { id: src, n: self.n });
        }
        if dst >= self.n {
            return Err(Error::IdOutOfRange { id: dst, n: self.n });
        }
        Ok(Some((src, dst)))
    }

    /// Target id of the record `ahead` places past the next one, if it is
    /// already buffered. Unchecked; only a hint.
    #[inline]
    pub fn peek_dst(&self, ahead: usize) -> Option<u64> {
        let rec = self.id_width.record_bytes();
        let at = self.pos + ahead * rec;
        if at + rec > self.filled {
            return None;
        }
        let b = &self.buf[at..at + rec];
        Some(match self.id_width {
            IdWidth::U32 => u64::from(u32::from_le_bytes([b[4], b[5], b[6], b[7]])),
            IdWidth::U64 => u64::from_le_bytes(b[8..16].try_into().unwrap()),
        })
    }

    /// Same as [`next_edge`](Self::next_edge) with ids narrowed to 32 bits.
    /// Callers must have checked that `n` fits.
    #[inline]
    pub fn next_pair(&mut self) -> Result<Option<(u32, u32)>> {
        Ok(self.next_edge()?.map(|(u, v)| (u as u32, v as u32)))
    }
}

impl Iterator for EdgeReader {
    type Item = Result<(u64, u64)>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_edge().transpose()
    }
}

/// Writes `edges` as a new graph file over `n` nodes.
pub fn write_edge_file<I>(
    path: impl AsRef<Path>,
    n: u64,
    id_width: IdWidth,
    edges: I,
    meter: &IoMeter,
) -> Result<GraphFile>
where
    I: IntoIterator<Item = (u64, u64)>,
{
    let mut w = EdgeWriter::create(path, n, id_width, meter)?;
    for (u, v) in edges {
        w.push(u, v)?;
    }
    w.finish()
}
