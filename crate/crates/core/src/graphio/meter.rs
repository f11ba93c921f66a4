//! Byte accounting for every transfer between the process and storage.
//!
//! Readers and writers in this crate wrap the raw file handle (below any
//! buffering layer) in [`CountingReader`] / [`CountingWriter`], so the
//! counters reflect what actually crossed the storage boundary.

use std::io::{self, Read, Seek, SeekFrom, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Shared read/write byte counters. Clones share the same counters.
#[derive(Debug, Clone, Default)]
pub struct IoMeter {
    read: Arc<AtomicU64>,
    written: Arc<AtomicU64>,
}

/// A point-in-time copy of an [`IoMeter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IoSnapshot {
    pub bytes_read: u64,
    pub bytes_written: u64,
}

impl IoSnapshot {
    /// Data transferred in both directions.
    pub fn total(&self) -> u64 {
        self.bytes_read + self.bytes_written
    }

    pub fn since(&self, earlier: IoSnapshot) -> IoSnapshot {
        IoSnapshot {
            bytes_read: self.bytes_read - earlier.bytes_read,
            bytes_written: self.bytes_written - earlier.bytes_written,
        }
    }
}

impl IoMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_read(&self, bytes: u64) {
        self.read.fetch_add(bytes, Ordering::Relaxed);
    }

    pub fn add_written(&self, bytes: u64) {
        self.written.fetch_add(bytes, Ordering::Relaxed);
    }

    pub fn bytes_read(&self) -> u64 {
        self.read.load(Ordering::Relaxed)
    }

    pub fn bytes_written(&self) -> u64 {
        self.written.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> IoSnapshot {
        IoSnapshot {
            bytes_read: self.bytes_read(),
            bytes_written: self.bytes_written(),
        }
    }
}

#[derive(Debug)]
pub struct CountingReader<R> {
    inner: R,
    meter: IoMeter,
}

impl<R> CountingReader<R> {
    pub fn new(inner: R, meter: IoMeter) -> Self {
        Self { inner, meter }
    }
}

impl<R: Read> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.meter.add_read(n as u64);
        Ok(n)
    }
}

impl<R: Seek> Seek for CountingReader<R> {
    fn seek(&mut self, pos: SeekFrom) -> io::Result<u64> {
        self.inner.seek(pos)
    }
}

#[derive(Debug)]
pub struct CountingWriter<W> {
    inner: W,
    meter: IoMeter,
}

impl<W> CountingWriter<W> {
    pub fn new(inner: W, meter: IoMeter) -> Self {
        Self { inner, meter }
    }

    pub fn get_ref(&self) -> &W {
        &self.inner
    }
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.meter.add_written(n as u64);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

impl<W: Seek> Seek for CountingWriter<W> {
    fn seek(&mut self, pos: SeekFrom) -> io::Result<u64> {
        self.inner.seek(pos)
    }
}
