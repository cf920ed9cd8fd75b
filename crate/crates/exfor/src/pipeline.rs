//! File-level parsing and normalization shared by the CLI commands.

use std::path::{Path, PathBuf};

use exfor_core::document::{entry_to_document, Document};
use exfor_core::normalize::{normalize_entry, NormalizeWarning, UnitTable};
use exfor_core::syntax::{parse_stream, DiagCode, Diagnostic, ExforEntry, ParseOptions};

use crate::inputs::{read_text, InputError};

/// Everything parsed from one input file.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub path: PathBuf,
    /// Entries usable downstream. In strict mode entries with errors are
    /// left out.
    pub entries: Vec<ExforEntry>,
    /// Envelopes seen, including ones that failed or were left out.
    pub seen: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedFile {
    pub fn warnings(&self) -> usize {
        self.diagnostics.iter().filter(|d| !d.is_error()).count()
    }

    pub fn errors(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.is_error()).count()
    }
}

pub fn parse_file(path: &Path, opts: &ParseOptions) -> Result<ParsedFile, InputError> {
    let text = read_text(path)?;
    Ok(parse_text(path, &text, opts))
}

pub fn parse_text(path: &Path, text: &str, opts: &ParseOptions) -> ParsedFile {
    let mut parsed = ParsedFile { path: path.into(), entries: Vec::new(), seen: 0, diagnostics: Vec::new() };
    let mut stream = parse_stream(text, opts);
    for item in stream.by_ref() {
        parsed.seen += 1;
        let keep = !(opts.strict && item.has_errors());
        parsed.diagnostics.extend(item.diagnostics);
        if let (Some(entry), true) = (item.entry, keep) {
            parsed.entries.push(entry);
        }
    }
    parsed.diagnostics.extend(stream.take_trailing_diagnostics());
    if parsed.seen == 0 {
        parsed.diagnostics.push(Diagnostic::new(DiagCode::MissingEnvelope, 0, "no ENTRY record found", opts));
    }
    parsed
}

/// Subentry documents of one file, ready for the store.
#[derive(Debug, Clone)]
pub struct NormalizedFile {
    pub parsed: ParsedFile,
    pub documents: Vec<Document>,
    pub warnings: Vec<NormalizeWarning>,
}

pub fn normalize_file(parsed: ParsedFile, units: &UnitTable) -> NormalizedFile {
    let mut documents = Vec::new();
    let mut warnings = Vec::new();
    for entry in &parsed.entries {
        // entry_to_document always yields an ID and a SUBENT array
        let (docs, w) = normalize_entry(&entry_to_document(entry), units).expect("converted entries are well formed");
        documents.extend(docs);
        warnings.extend(w);
    }
    NormalizedFile { parsed, documents, warnings }
}

/// `path:line: severity [code]: message`, without the line for
/// end-of-input conditions.
pub fn format_diagnostic(path: &Path, d: &Diagnostic) -> String {
    let location = match d.line_no {
        0 => path.display().to_string(),
        n => format!("{}:{n}", path.display()),
    };
    format!("{location}: {} [{}]: {}", d.severity, d.code, d.message)
}
