use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::iter::Enumerate;
use core::str::Lines;

use super::{
    classify_record, parse_bib_block, parse_common_block, parse_data_block, split_line, BlockHeader,
    DiagCode, Diagnostic, ExforEntry, ExforSubentry, ParseOptions, RawLine, RecordKind,
};

/// One entry produced by [`parse_stream`].
///
/// `entry` is `None` when the envelope itself was broken (nested or
/// truncated); the diagnostics then say why.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamItem {
    pub entry: Option<ExforEntry>,
    pub diagnostics: Vec<Diagnostic>,
    /// Line number of the `ENTRY` record.
    pub first_line: usize,
}

impl StreamItem {
    pub fn is_failed(&self) -> bool {
        self.entry.is_none()
    }

    pub fn has_errors(&self) -> bool {
        self.is_failed() || self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Structural failure of [`parse_entry`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryError {
    pub code: DiagCode,
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for EntryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if let Some(d) = self.diagnostics.iter().find(|d| d.code == self.code) {
            write!(f, ": {}", d.message)?;
        }
        Ok(())
    }
}

impl core::error::Error for EntryError {}

/// Parse text holding exactly one `ENTRY ... ENDENTRY` envelope.
pub fn parse_entry(text: &str, opts: &ParseOptions) -> Result<(ExforEntry, Vec<Diagnostic>), EntryError> {
    let mut stream = parse_stream(text, opts);
    let Some(item) = stream.next() else {
        let mut diagnostics = stream.take_trailing_diagnostics();
        diagnostics.push(Diagnostic::new(DiagCode::MissingEnvelope, 0, "no ENTRY record found", opts));
        return Err(EntryError { code: DiagCode::MissingEnvelope, diagnostics });
    };
    let StreamItem { entry, mut diagnostics, .. } = item;
    match entry {
        Some(entry) => {
            if let Some(extra) = stream.next() {
                diagnostics.push(Diagnostic::new(
                    DiagCode::UnexpectedRecord,
                    extra.first_line,
                    "text holds more than one entry; only the first is used",
                    opts,
                ));
            }
            diagnostics.extend(stream.take_trailing_diagnostics());
            Ok((entry, diagnostics))
        }
        None => {
            let code = match diagnostics.iter().find(|d| d.is_error()).map(|d| d.code) {
                Some(DiagCode::TruncatedInput) | None => {
                    diagnostics.push(Diagnostic::new(DiagCode::MissingEnvelope, 0, "no ENDENTRY record found", opts));
                    DiagCode::MissingEnvelope
                }
                Some(code) => code,
            };
            Err(EntryError { code, diagnostics })
        }
    }
}

/// Iterate over the entries of a file, skipping `TRANS` envelopes.
///
/// A broken entry is yielded as a failed [`StreamItem`] and parsing resumes
/// with the next one.
pub fn parse_stream<'a>(text: &'a str, opts: &ParseOptions) -> EntryStream<'a> {
    EntryStream {
        lines: text.lines().enumerate(),
        opts: *opts,
        pushed_back: None,
        outside: Vec::new(),
    }
}

#[derive(Debug)]
pub struct EntryStream<'a> {
    lines: Enumerate<Lines<'a>>,
    opts: ParseOptions,
    pushed_back: Option<(RawLine, RecordKind)>,
    /// Diagnostics for records outside any entry, handed to the next item.
    outside: Vec<Diagnostic>,
}

impl EntryStream<'_> {
    /// Diagnostics for records after the last entry. Meaningful once the
    /// iterator is exhausted.
    pub fn take_trailing_diagnostics(&mut self) -> Vec<Diagnostic> {
        core::mem::take(&mut self.outside)
    }

    fn next_line(&mut self, diags: &mut Vec<Diagnostic>) -> Option<(RawLine, RecordKind)> {
        if let Some(pending) = self.pushed_back.take() {
            return Some(pending);
        }
        let (index, raw) = self.lines.next()?;
        let (line, warning) = split_line(raw, index + 1);
        diags.extend(warning);
        let kind = classify_record(&line);
        Some((line, kind))
    }
}

impl Iterator for EntryStream<'_> {
    type Item = StreamItem;

    fn next(&mut self) -> Option<StreamItem> {
        let opts = self.opts;
        let mut outside = core::mem::take(&mut self.outside);
        let start = loop {
            let Some((line, kind)) = self.next_line(&mut outside) else {
                self.outside = outside;
                return None;
            };
            match kind {
                RecordKind::Entry => break line,
                RecordKind::Trans | RecordKind::EndTrans => {}
                RecordKind::OtherSystem => outside.push(Diagnostic::new(
                    DiagCode::UnknownRecord,
                    line.line_no,
                    format!("skipping system record {}", line.field(0).trim()),
                    &opts,
                )),
                RecordKind::Content if line.is_blank() => {}
                _ => outside.push(Diagnostic::new(
                    DiagCode::UnexpectedRecord,
                    line.line_no,
                    format!("record {:?} outside of an entry", line.content.trim()),
                    &opts,
                )),
            }
        };

        let first_line = start.line_no;
        let mut diagnostics = outside;
        let mut collected = Vec::new();
        collected.push((start, RecordKind::Entry));
        loop {
            match self.next_line(&mut diagnostics) {
                None => {
                    diagnostics.push(Diagnostic::new(
                        DiagCode::TruncatedInput,
                        0,
                        format!("entry starting at line {first_line} has no ENDENTRY"),
                        &opts,
                    ));
                    return Some(StreamItem { entry: None, diagnostics, first_line });
                }
                Some((line, RecordKind::Entry)) => {
                    diagnostics.push(Diagnostic::new(
                        DiagCode::NestedEntry,
                        line.line_no,
                        format!("ENTRY before ENDENTRY of the entry starting at line {first_line}"),
                        &opts,
                    ));
                    self.pushed_back = Some((line, RecordKind::Entry));
                    return Some(StreamItem { entry: None, diagnostics, first_line });
                }
                Some((line, RecordKind::EndEntry)) => {
                    collected.push((line, RecordKind::EndEntry));
                    break;
                }
                Some(record) => collected.push(record),
            }
        }

        let entry = EntryBuilder::new(&opts, &mut diagnostics).build(&collected);
        Some(StreamItem { entry: Some(entry), diagnostics, first_line })
    }
}

struct EntryBuilder<'a> {
    opts: &'a ParseOptions,
    diags: &'a mut Vec<Diagnostic>,
    entry: ExforEntry,
    current: Option<(ExforSubentry, usize)>,
}

impl<'a> EntryBuilder<'a> {
    fn new(opts: &'a ParseOptions, diags: &'a mut Vec<Diagnostic>) -> Self {
        EntryBuilder { opts, diags, entry: ExforEntry::default(), current: None }
    }

    fn push(&mut self, code: DiagCode, line_no: usize, message: String) {
        self.diags.push(Diagnostic::new(code, line_no, message, self.opts));
    }

    /// `records` runs from the `ENTRY` record through `ENDENTRY`.
    fn build(mut self, records: &[(RawLine, RecordKind)]) -> ExforEntry {
        let (head, _) = &records[0];
        self.entry.entry_id = String::from(head.field(1).trim());
        if !is_accession(&self.entry.entry_id, 5) {
            let message = format!("entry ID {:?} is not 5 alphanumeric characters", self.entry.entry_id);
            self.push(DiagCode::BadAccession, head.line_no, message);
        }
        if self.opts.strict {
            self.check_idents(records);
        }

        let body = &records[1..records.len() - 1];
        let mut i = 0;
        while i < body.len() {
            let (line, kind) = &body[i];
            i += 1;
            match kind {
                RecordKind::Subent => {
                    self.close_subentry(line.line_no, true);
                    let id = self.subentry_id(line);
                    let sub = ExforSubentry { subent_id: id, ..ExforSubentry::default() };
                    self.current = Some((sub, line.line_no));
                }
                RecordKind::NoSubent => {
                    self.close_subentry(line.line_no, true);
                    let id = self.subentry_id(line);
                    let sub = ExforSubentry { subent_id: id, is_nosubent: true, ..ExforSubentry::default() };
                    self.entry.subentries.push(sub);
                }
                RecordKind::EndSubent => {
                    if self.current.is_none() {
                        self.push(DiagCode::UnexpectedRecord, line.line_no, String::from("ENDSUBENT without SUBENT"));
                    }
                    self.close_subentry(line.line_no, false);
                }
                RecordKind::Bib | RecordKind::Common | RecordKind::Data => {
                    let (content, consumed) = self.block_content(*kind, line, &body[i..]);
                    i += consumed;
                    self.add_block(*kind, line, &content);
                }
                RecordKind::NoBib | RecordKind::NoCommon | RecordKind::NoData => {
                    if self.current.is_none() {
                        let message = format!("{} outside of a subentry", line.field(0).trim());
                        self.push(DiagCode::UnexpectedRecord, line.line_no, message);
                    }
                }
                RecordKind::Trans | RecordKind::EndTrans | RecordKind::OtherSystem => {
                    let message = format!("skipping system record {}", line.field(0).trim());
                    self.push(DiagCode::UnknownRecord, line.line_no, message);
                }
                RecordKind::Content if line.is_blank() => {}
                _ => {
                    let message = format!("record {:?} outside of a block", line.content.trim_end());
                    self.push(DiagCode::UnexpectedRecord, line.line_no, message);
                }
            }
        }
        let end_line = records[records.len() - 1].0.line_no;
        self.close_subentry(end_line, true);
        self.entry
    }

    fn subentry_id(&mut self, line: &RawLine) -> String {
        let id = String::from(line.field(1).trim());
        if !is_accession(&id, 8) || !id.starts_with(self.entry.entry_id.as_str()) {
            let message = format!(
                "subentry ID {id:?} is not 8 alphanumeric characters starting with entry ID {:?}",
                self.entry.entry_id
            );
            self.push(DiagCode::BadAccession, line.line_no, message);
        }
        id
    }

    fn close_subentry(&mut self, line_no: usize, implicit: bool) {
        if let Some((sub, opened)) = self.current.take() {
            if implicit {
                let message = format!("SUBENT {} opened at line {opened} has no ENDSUBENT", sub.subent_id);
                self.push(DiagCode::UnterminatedBlock, line_no, message);
            }
            self.entry.subentries.push(sub);
        }
    }

    /// Content records of a block up to its end record. Returns the lines and
    /// how many records were consumed, including the end record when found.
    fn block_content(&mut self, kind: RecordKind, header: &RawLine, rest: &[(RawLine, RecordKind)]) -> (Vec<RawLine>, usize) {
        let end = match kind {
            RecordKind::Bib => RecordKind::EndBib,
            RecordKind::Common => RecordKind::EndCommon,
            _ => RecordKind::EndData,
        };
        let mut content = Vec::new();
        for (consumed, (line, k)) in rest.iter().enumerate() {
            if *k == end {
                return (content, consumed + 1);
            }
            if matches!(k, RecordKind::Subent | RecordKind::NoSubent | RecordKind::EndSubent) {
                self.unterminated(header, line.line_no);
                return (content, consumed);
            }
            // headings such as DATA are ordinary content inside a block
            content.push(line.clone());
        }
        self.unterminated(header, rest.last().map_or(header.line_no, |(l, _)| l.line_no + 1));
        (content, rest.len())
    }

    fn unterminated(&mut self, header: &RawLine, line_no: usize) {
        let name = header.field(0).trim();
        let message = format!("{name} block opened at line {} has no END{name}", header.line_no);
        self.push(DiagCode::UnterminatedBlock, line_no, message);
    }

    fn add_block(&mut self, kind: RecordKind, header_line: &RawLine, content: &[RawLine]) {
        let header = self.block_header(header_line);
        let Some((sub, _)) = self.current.as_mut() else {
            let message = format!("{} block outside of a subentry", header_line.field(0).trim());
            self.push(DiagCode::UnexpectedRecord, header_line.line_no, message);
            return;
        };
        let duplicate = match kind {
            RecordKind::Bib => {
                let (block, diags) = parse_bib_block(header, content, self.opts);
                self.diags.extend(diags);
                sub.bib.replace(block).is_some()
            }
            RecordKind::Common => {
                let (block, diags) = parse_common_block(header, content, self.opts);
                self.diags.extend(diags);
                sub.common.replace(block).is_some()
            }
            _ => {
                let (block, diags) = parse_data_block(header, content, self.opts);
                self.diags.extend(diags);
                sub.data.replace(block).is_some()
            }
        };
        if duplicate {
            let message = format!("second {} block in subentry replaces the first", header_line.field(0).trim());
            self.push(DiagCode::UnexpectedRecord, header_line.line_no, message);
        }
    }

    fn block_header(&mut self, line: &RawLine) -> BlockHeader {
        let mut counter = |index: usize| -> u32 {
            let text = line.field(index).trim();
            if text.is_empty() {
                return 0;
            }
            text.parse().unwrap_or_else(|_| {
                let message = format!("counter field {:?} is not a non-negative integer", text);
                self.push(DiagCode::MalformedNumber, line.line_no, message);
                0
            })
        };
        let n1 = counter(1);
        let n2 = counter(2);
        BlockHeader::new(n1, n2, line.line_no)
    }

    fn check_idents(&mut self, records: &[(RawLine, RecordKind)]) {
        let id = self.entry.entry_id.clone();
        let mismatches: Vec<usize> = records
            .iter()
            .map(|(line, _)| line)
            .filter(|line| !line.ident.trim().is_empty())
            .filter(|line| line.ident.get(..5) != Some(id.as_str()))
            .map(|line| line.line_no)
            .collect();
        if let Some(&first) = mismatches.first() {
            let message = format!(
                "{} line(s) carry an identification area not matching entry {id}",
                mismatches.len()
            );
            self.push(DiagCode::IdentMismatch, first, message);
        }
    }
}

fn is_accession(id: &str, len: usize) -> bool {
    id.len() == len && id.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const MINIMAL: &str = "\
ENTRY            T0001   20260101
SUBENT        T0001001   20260101
BIB                  2          2
TITLE      A minimal test entry
AUTHOR     (A.PERSON)
ENDBIB               2
NOCOMMON
ENDSUBENT            4
SUBENT        T0001002   20260101
BIB                  1          1
REACTION   (26-FE-56(N,EL)26-FE-56,,SIG)
ENDBIB               1
NOCOMMON
DATA                 2          2
EN         DATA
MEV        MB
1.0        2.5+3
2.0        2.4E+03
ENDDATA              4
ENDSUBENT            9
ENDENTRY             2
";

    fn codes(diags: &[Diagnostic]) -> Vec<DiagCode> {
        diags.iter().map(|d| d.code).collect()
    }

    #[test]
    fn minimal_entry() {
        let (entry, diags) = parse_entry(MINIMAL, &ParseOptions::STRICT).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(entry.entry_id, "T0001");
        assert_eq!(entry.subentries.len(), 2);
        let first = &entry.subentries[0];
        assert_eq!(first.subent_id, "T0001001");
        assert_eq!(first.bib.as_ref().unwrap().items.len(), 2);
        assert!(first.data.is_none());
        let second = &entry.subentries[1];
        let data = second.data.as_ref().unwrap();
        assert_eq!(data.rows, [vec![Some(1.0), Some(2500.0)], vec![Some(2.0), Some(2400.0)]]);
    }

    #[test]
    fn missing_endentry() {
        let text = MINIMAL.replace("ENDENTRY             2\n", "");
        let err = parse_entry(&text, &ParseOptions::LENIENT).unwrap_err();
        assert_eq!(err.code, DiagCode::MissingEnvelope);
    }

    #[test]
    fn missing_entry_record() {
        let err = parse_entry("", &ParseOptions::LENIENT).unwrap_err();
        assert_eq!(err.code, DiagCode::MissingEnvelope);
    }

    #[test]
    fn nosubent_placeholder() {
        let text = MINIMAL.replace("ENDENTRY", "NOSUBENT      T0001003   20260101\nENDENTRY");
        let (entry, diags) = parse_entry(&text, &ParseOptions::STRICT).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(entry.subentries.len(), 3);
        assert!(entry.subentries[2].is_nosubent);
        assert_eq!(entry.subentries[2].subent_id, "T0001003");
    }

    #[test]
    fn heading_named_data_is_content() {
        let text = MINIMAL.replace("EN         DATA\nMEV        MB", "DATA       EN\nMB         MEV");
        let (entry, diags) = parse_entry(&text, &ParseOptions::STRICT).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(entry.subentries[1].data.as_ref().unwrap().headings, ["DATA", "EN"]);
    }

    #[test]
    fn missing_endsubent_is_reported() {
        let text = MINIMAL.replacen("ENDSUBENT            4\n", "", 1);
        let (entry, diags) = parse_entry(&text, &ParseOptions::LENIENT).unwrap();
        assert_eq!(codes(&diags), [DiagCode::UnterminatedBlock]);
        assert_eq!(entry.subentries.len(), 2);
    }

    #[test]
    fn bad_subentry_prefix() {
        let text = MINIMAL.replace("SUBENT        T0001002", "SUBENT        T0002002");
        let (_, diags) = parse_entry(&text, &ParseOptions::LENIENT).unwrap();
        assert_eq!(codes(&diags), [DiagCode::BadAccession]);
    }

    #[test]
    fn strict_ident_check() {
        let text = MINIMAL.replace(
            "AUTHOR     (A.PERSON)",
            "AUTHOR     (A.PERSON)                                             T0009001    5",
        );
        let (_, lenient) = parse_entry(&text, &ParseOptions::LENIENT).unwrap();
        assert!(lenient.is_empty());
        let (_, strict) = parse_entry(&text, &ParseOptions::STRICT).unwrap();
        assert_eq!(codes(&strict), [DiagCode::IdentMismatch]);
        assert_eq!(strict[0].line_no, 5);
    }

    #[test]
    fn empty_stream() {
        assert_eq!(parse_stream("", &ParseOptions::LENIENT).count(), 0);
    }

    #[test]
    fn stream_with_trans_envelope() {
        let text = format!("TRANS         T001   20260101\n{MINIMAL}{}ENDTRANS             2\n", MINIMAL.replace("T0001", "T0002"));
        let items: Vec<_> = parse_stream(&text, &ParseOptions::STRICT).collect();
        assert_eq!(items.len(), 2);
        assert!(items.iter().all(|i| !i.has_errors() && i.diagnostics.is_empty()));
        assert_eq!(items[1].entry.as_ref().unwrap().entry_id, "T0002");
    }

    #[test]
    fn stream_recovers_from_nested_entry() {
        let broken = MINIMAL.replace("ENDENTRY             2\n", "");
        let text = format!("{MINIMAL}{broken}{}", MINIMAL.replace("T0001", "T0003"));
        let items: Vec<_> = parse_stream(&text, &ParseOptions::LENIENT).collect();
        assert_eq!(items.len(), 3);
        assert!(!items[0].is_failed());
        assert!(items[1].is_failed());
        assert_eq!(codes(&items[1].diagnostics), [DiagCode::NestedEntry]);
        assert_eq!(items[2].entry.as_ref().unwrap().entry_id, "T0003");
    }

    #[test]
    fn stream_survives_every_truncation() {
        for cut in 0..=MINIMAL.len() {
            let items: Vec<_> = parse_stream(&MINIMAL[..cut], &ParseOptions::LENIENT).collect();
            assert!(items.len() <= 1);
        }
    }
}
