//! NDJSON document store with an in-memory ID index.
//!
//! Documents are appended one JSON object per line. A document whose ID is
//! already present supersedes the earlier line; superseded lines stay in
//! the file until [`DocumentStore::compact`] rewrites it. The index is
//! rebuilt by a full scan when the store is opened.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use exfor_core::document::Document;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: store does not exist")]
    Missing { path: PathBuf },
    #[error("{path}: corrupt line {line} at byte {offset}: {message}")]
    CorruptLine { path: PathBuf, line: usize, offset: u64, message: String },
}

/// Counts from one [`DocumentStore::ingest`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub inserted: usize,
    pub replaced: usize,
    pub rejected: usize,
}

/// An ingest that stopped on an IO failure, with what was written so far.
#[derive(Debug, thiserror::Error)]
#[error("ingest aborted after {} documents: {error}", .report.inserted + .report.replaced)]
pub struct IngestFailure {
    pub report: IngestReport,
    pub error: StoreError,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    offset: u64,
    line: usize,
}

#[derive(Debug)]
pub struct DocumentStore {
    path: PathBuf,
    /// Read handle. Scans and lookups read through it, so they keep seeing
    /// the file they were opened on even if another store compacts it.
    file: Arc<File>,
    index: HashMap<String, Slot>,
    len: u64,
    lines: usize,
    ends_with_newline: bool,
    corrupt: Vec<StoreError>,
}

impl DocumentStore {
    /// Open an existing store.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::Missing { path }),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        Self::load(path, file)
    }

    /// Open a store, creating an empty one if the file does not exist.
    pub fn open_or_create(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| StoreError::Io { path: path.clone(), source })?;
        Self::open(path)
    }

    fn load(path: PathBuf, file: File) -> Result<Self, StoreError> {
        let file = Arc::new(file);
        let mut store = DocumentStore {
            path,
            file,
            index: HashMap::new(),
            len: 0,
            lines: 0,
            ends_with_newline: true,
            corrupt: Vec::new(),
        };
        let end = store.file.metadata().map_err(|e| store.io(e))?.len();
        let mut reader = BufReader::new(SnapshotReader::new(&store.file, 0, end));
        let mut buf = Vec::new();
        let mut offset = 0;
        let mut line = 0;
        loop {
            buf.clear();
            let n = reader.read_until(b'\n', &mut buf).map_err(|e| store.io(e))?;
            if n == 0 {
                break;
            }
            line += 1;
            store.ends_with_newline = buf.last() == Some(&b'\n');
            match store.parse_line(&buf, line, offset) {
                Ok(doc) => {
                    let id = doc.id().expect("parse_line checks the ID").to_owned();
                    store.index.insert(id, Slot { offset, line });
                }
                Err(e) => store.corrupt.push(e),
            }
            offset += n as u64;
        }
        store.len = offset;
        store.lines = line;
        Ok(store)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Number of live documents.
    pub fn doc_count(&self) -> usize {
        self.index.len()
    }

    /// Number of physical lines, superseded versions included.
    pub fn line_count(&self) -> usize {
        self.lines
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Corrupt lines found when the store was opened.
    pub fn corrupt_lines(&self) -> &[StoreError] {
        &self.corrupt
    }

    fn io(&self, source: io::Error) -> StoreError {
        StoreError::Io { path: self.path.clone(), source }
    }

    fn parse_line(&self, bytes: &[u8], line: usize, offset: u64) -> Result<Document, StoreError> {
        let corrupt = |message: String| StoreError::CorruptLine { path: self.path.clone(), line, offset, message };
        let text = std::str::from_utf8(bytes).map_err(|e| corrupt(e.to_string()))?;
        let doc = Document::from_json(text.trim_end_matches(['\n', '\r'])).map_err(|e| corrupt(e.to_string()))?;
        if doc.id().is_none() {
            return Err(corrupt("document has no string ID".into()));
        }
        Ok(doc)
    }

    /// Append documents. A document whose ID is already stored replaces it;
    /// documents without a string ID are rejected.
    pub fn ingest<I>(&mut self, docs: I) -> Result<IngestReport, IngestFailure>
    where
        I: IntoIterator<Item = Document>,
    {
        let mut report = IngestReport::default();
        let result = self.append_all(docs, &mut report);
        match result {
            Ok(()) => Ok(report),
            Err(error) => Err(IngestFailure { report, error }),
        }
    }

    fn append_all<I>(&mut self, docs: I, report: &mut IngestReport) -> Result<(), StoreError>
    where
        I: IntoIterator<Item = Document>,
    {
        let file = OpenOptions::new().append(true).open(&self.path).map_err(|e| self.io(e))?;
        let mut writer = BufWriter::new(file);
        if !self.ends_with_newline {
            // terminate a torn last line so it cannot swallow the next document
            writer.write_all(b"\n").map_err(|e| self.io(e))?;
            self.len += 1;
            self.ends_with_newline = true;
        }
        for doc in docs {
            let Some(id) = doc.id().map(str::to_owned) else {
                report.rejected += 1;
                continue;
            };
            let mut text = doc.to_json();
            text.push('\n');
            writer.write_all(text.as_bytes()).map_err(|e| self.io(e))?;
            self.lines += 1;
            let slot = Slot { offset: self.len, line: self.lines };
            self.len += text.len() as u64;
            match self.index.insert(id, slot) {
                Some(_) => report.replaced += 1,
                None => report.inserted += 1,
            }
        }
        let file = writer.into_inner().map_err(|e| self.io(e.into_error()))?;
        file.sync_data().map_err(|e| self.io(e))?;
        Ok(())
    }

    /// The live document with this ID.
    pub fn get_by_id(&self, id: &str) -> Result<Option<Document>, StoreError> {
        let Some(slot) = self.index.get(id).copied() else {
            return Ok(None);
        };
        let mut reader = BufReader::new(SnapshotReader::new(&self.file, slot.offset, self.len));
        let mut buf = Vec::new();
        reader.read_until(b'\n', &mut buf).map_err(|e| self.io(e))?;
        let doc = self.parse_line(&buf, slot.line, slot.offset)?;
        if doc.id() != Some(id) {
            return Err(StoreError::CorruptLine {
                path: self.path.clone(),
                line: slot.line,
                offset: slot.offset,
                message: format!("indexed line holds ID {:?}, expected {id:?}", doc.id()),
            });
        }
        Ok(Some(doc))
    }

    /// Stream live documents in file order. Corrupt lines are reported as
    /// errors in the stream and skipped.
    pub fn scan(&self) -> Scan<'_> {
        Scan {
            store: self,
            reader: BufReader::new(SnapshotReader::new(&self.file, 0, self.len)),
            buf: Vec::new(),
            offset: 0,
            line: 0,
        }
    }

    /// Rewrite the file with live documents only.
    ///
    /// The new file is written next to the old one and renamed over it, so
    /// the data is never only in a partially written file.
    pub fn compact(&mut self) -> Result<(), StoreError> {
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| self.io(e))?;
        {
            let mut writer = BufWriter::new(tmp.as_file());
            // corrupt lines cannot be carried over
            for doc in self.scan().filter_map(Result::ok) {
                let mut text = doc.to_json();
                text.push('\n');
                writer.write_all(text.as_bytes()).map_err(|e| self.io(e))?;
            }
            writer.flush().map_err(|e| self.io(e))?;
        }
        tmp.as_file().sync_all().map_err(|e| self.io(e))?;
        tmp.persist(&self.path).map_err(|e| self.io(e.error))?;
        *self = DocumentStore::open(&self.path)?;
        Ok(())
    }
}

/// Iterator returned by [`DocumentStore::scan`].
#[derive(Debug)]
pub struct Scan<'a> {
    store: &'a DocumentStore,
    reader: BufReader<SnapshotReader>,
    buf: Vec<u8>,
    offset: u64,
    line: usize,
}

impl Iterator for Scan<'_> {
    type Item = Result<Document, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            let n = match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(n) => n,
                Err(e) => return Some(Err(self.store.io(e))),
            };
            let offset = self.offset;
            self.offset += n as u64;
            self.line += 1;
            if self.buf.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            match self.store.parse_line(&self.buf, self.line, offset) {
                Ok(doc) => {
                    let live = doc
                        .id()
                        .and_then(|id| self.store.index.get(id))
                        .is_some_and(|slot| slot.offset == offset);
                    if live {
                        return Some(Ok(doc));
                    }
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Positional reads over a shared file handle, bounded by `end`.
#[derive(Debug)]
struct SnapshotReader {
    file: Arc<File>,
    pos: u64,
    end: u64,
}

impl SnapshotReader {
    fn new(file: &Arc<File>, pos: u64, end: u64) -> Self {
        SnapshotReader { file: Arc::clone(file), pos, end }
    }
}

impl Read for SnapshotReader {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let remaining = self.end.saturating_sub(self.pos);
        let want = buf.len().min(remaining as usize);
        if want == 0 {
            return Ok(0);
        }
        let n = read_at(&self.file, &mut buf[..want], self.pos)?;
        self.pos += n as u64;
        Ok(n)
    }
}

#[cfg(unix)]
fn read_at(file: &File, buf: &mut [u8], offset: u64) -> io::Result<usize> {
    std::os::unix::fs::FileExt::read_at(file, buf, offset)
}

#[cfg(windows)]
fn read_at(file: &File, buf: &mut [u8], offset: u64) -> io::Result<usize> {
    std::os::windows::fs::FileExt::seek_read(file, buf, offset)
}
