//! Lexing and parsing of the EXFOR exchange format.
//!
//! A physical line carries up to 66 columns of content, cut into six
//! fields of eleven characters, followed by a 14-column system
//! identification area. System records (`ENTRY`, `BIB`, `ENDDATA`, ...)
//! delimit blocks and carry a pair of counters in fields 2 and 3.

mod block;
mod entry;
mod line;
mod number;
mod record;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use block::{parse_bib_block, parse_common_block, parse_data_block, BlockHeader};
pub use entry::{parse_entry, parse_stream, EntryError, EntryStream, StreamItem};
pub use line::{slice_fields, split_line, RawLine, CONTENT_WIDTH, FIELDS_PER_LINE, FIELD_WIDTH};
pub use number::{parse_fortran_number, MalformedNumber};
pub use record::{classify_record, RecordKind};

/// The two numeric fields following a block keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CounterPair {
    pub n1: u32,
    pub n2: u32,
}

impl CounterPair {
    pub const fn new(n1: u32, n2: u32) -> Self {
        CounterPair { n1, n2 }
    }
}

/// One keyword record of a BIB block together with its continuation lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibItem {
    pub keyword: String,
    pub pointer: Option<char>,
    /// Value text from column 12 onward, one line per physical record.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BibBlock {
    pub items: Vec<BibItem>,
    pub declared: CounterPair,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommonBlock {
    pub headings: Vec<String>,
    pub units: Vec<String>,
    pub values: Vec<Option<f64>>,
    pub declared: CounterPair,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataBlock {
    pub headings: Vec<String>,
    pub units: Vec<String>,
    /// Row-major cells; every row has `headings.len()` entries.
    pub rows: Vec<Vec<Option<f64>>>,
    pub declared: CounterPair,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExforSubentry {
    pub subent_id: String,
    pub bib: Option<BibBlock>,
    pub common: Option<CommonBlock>,
    pub data: Option<DataBlock>,
    pub is_nosubent: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExforEntry {
    pub entry_id: String,
    pub subentries: Vec<ExforSubentry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Identifies what a [`Diagnostic`] is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagCode {
    LineTooLong,
    MalformedNumber,
    DanglingContinuation,
    CounterMismatch,
    RaggedRow,
    MissingEnvelope,
    NestedEntry,
    TruncatedInput,
    UnterminatedBlock,
    UnexpectedRecord,
    UnknownRecord,
    BadAccession,
    IdentMismatch,
    DuplicateColumn,
}

impl DiagCode {
    pub const fn as_str(self) -> &'static str {
        match self {
            DiagCode::LineTooLong => "LineTooLong",
            DiagCode::MalformedNumber => "MalformedNumber",
            DiagCode::DanglingContinuation => "DanglingContinuation",
            DiagCode::CounterMismatch => "CounterMismatch",
            DiagCode::RaggedRow => "RaggedRow",
            DiagCode::MissingEnvelope => "MissingEnvelope",
            DiagCode::NestedEntry => "NestedEntry",
            DiagCode::TruncatedInput => "TruncatedInput",
            DiagCode::UnterminatedBlock => "UnterminatedBlock",
            DiagCode::UnexpectedRecord => "UnexpectedRecord",
            DiagCode::UnknownRecord => "UnknownRecord",
            DiagCode::BadAccession => "BadAccession",
            DiagCode::IdentMismatch => "IdentMismatch",
            DiagCode::DuplicateColumn => "DuplicateColumn",
        }
    }

    /// Severity of the code under the given strictness.
    ///
    /// Envelope failures are always errors. Inconsistencies that the parser
    /// can recover from are warnings unless `strict` is set.
    pub const fn severity(self, strict: bool) -> Severity {
        match self {
            DiagCode::MissingEnvelope | DiagCode::NestedEntry | DiagCode::TruncatedInput => {
                Severity::Error
            }
            DiagCode::LineTooLong | DiagCode::UnknownRecord | DiagCode::DuplicateColumn => {
                Severity::Warning
            }
            _ if strict => Severity::Error,
            _ => Severity::Warning,
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A problem found while parsing, tied to a 1-based input line
/// (0 for end-of-input conditions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub line_no: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagCode, line_no: usize, message: impl Into<String>, opts: &ParseOptions) -> Self {
        Diagnostic {
            severity: code.severity(opts.strict),
            code,
            line_no,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} [{}]: {}", self.line_no, self.severity, self.code, self.message)
    }
}

/// Parser switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Promote recoverable inconsistencies to errors and cross-check the
    /// identification area (columns 67-80) against the envelope IDs.
    pub strict: bool,
}

impl ParseOptions {
    pub const LENIENT: ParseOptions = ParseOptions { strict: false };
    pub const STRICT: ParseOptions = ParseOptions { strict: true };
}
