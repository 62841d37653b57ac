use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::codec::write_uleb;

#[derive(Debug, Error)]
pub enum QueueError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("queue file ends inside a frame")]
    TruncatedFrame,
    #[error("frame length {0} exceeds the sanity limit")]
    OversizedFrame(u64),
}

/// Frames larger than this are treated as corruption.
const MAX_FRAME: u64 = 64 * 1024 * 1024;

/// Append-only file of length-prefixed payload frames: the wire leg between
/// producers and the consumer. One writer per file; any number of readers.
pub struct QueueFile {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl QueueFile {
    /// Opens for appending, creating the file if needed.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, QueueError> {
        let path = path.into();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, writer: BufWriter::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends one frame and flushes it to the OS.
    pub fn append(&mut self, payload: &[u8]) -> Result<(), QueueError> {
        let mut header = Vec::with_capacity(4);
        write_uleb(&mut header, payload.len() as u64);
        self.writer.write_all(&header)?;
        self.writer.write_all(payload)?;
        self.writer.flush()?;
        Ok(())
    }

    /// A reader over the frames currently in the file.
    pub fn reader(&self) -> Result<QueueReader, QueueError> {
        QueueReader::open(&self.path)
    }
}

/// Sequential frame reader; position only moves forward.
pub struct QueueReader {
    inner: BufReader<File>,
}

impl QueueReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, QueueError> {
        Ok(Self { inner: BufReader::new(File::open(path)?) })
    }

    /// The next frame, or `None` at a clean end of file. A file ending
    /// mid-frame is an error.
    pub fn next_frame(&mut self) -> Result<Option<Vec<u8>>, QueueError> {
        let mut len: u64 = 0;
        let mut shift = 0u32;
        let mut first = true;
        loop {
            let mut byte = [0u8; 1];
            match self.inner.read_exact(&mut byte) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof && first => {
                    return Ok(None);
                }
                Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
                    return Err(QueueError::TruncatedFrame);
                }
                Err(e) => return Err(e.into()),
            }
            first = false;
            len |= u64::from(byte[0] & 0x7f) << shift;
            if byte[0] & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 63 {
                return Err(QueueError::TruncatedFrame);
            }
        }
        if len > MAX_FRAME {
            return Err(QueueError::OversizedFrame(len));
        }
        let mut frame = vec![0u8; len as usize];
        self.inner
            .read_exact(&mut frame)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::UnexpectedEof => QueueError::TruncatedFrame,
                _ => QueueError::Io(e),
            })?;
        Ok(Some(frame))
    }

    /// Drains the remaining frames into a vector.
    pub fn collect_frames(mut self) -> Result<Vec<Vec<u8>>, QueueError> {
        let mut out = Vec::new();
        while let Some(frame) = self.next_frame()? {
            out.push(frame);
        }
        Ok(out)
    }
}
