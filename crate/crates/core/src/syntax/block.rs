use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::line::{byte_offset, FIELDS_PER_LINE};
use super::{
    parse_fortran_number, slice_fields, BibBlock, BibItem, CommonBlock, CounterPair, DataBlock,
    DiagCode, Diagnostic, ParseOptions, RawLine,
};

/// Counters of a block record and the line they were declared on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub declared: CounterPair,
    pub line_no: usize,
}

impl BlockHeader {
    pub const fn new(n1: u32, n2: u32, line_no: usize) -> Self {
        BlockHeader { declared: CounterPair::new(n1, n2), line_no }
    }
}

struct Diagnostics<'a> {
    opts: &'a ParseOptions,
    list: Vec<Diagnostic>,
}

impl<'a> Diagnostics<'a> {
    fn new(opts: &'a ParseOptions) -> Self {
        Diagnostics { opts, list: Vec::new() }
    }

    fn push(&mut self, code: DiagCode, line_no: usize, message: String) {
        self.list.push(Diagnostic::new(code, line_no, message, self.opts));
    }

    fn check_counter(&mut self, block: &str, header: &BlockHeader, which: &str, declared: u32, found: usize) {
        if declared as usize != found {
            self.push(
                DiagCode::CounterMismatch,
                header.line_no,
                format!("{block} declares {declared} {which}, found {found}"),
            );
        }
    }
}

/// Parse the content records between `BIB` and `ENDBIB`.
///
/// A non-blank keyword in columns 1-10 opens a new item. A line with blank
/// keyword columns but a pointer in column 11 opens a new item for the
/// previous keyword; otherwise it continues the current item's text.
pub fn parse_bib_block(
    header: BlockHeader,
    lines: &[RawLine],
    opts: &ParseOptions,
) -> (BibBlock, Vec<Diagnostic>) {
    let mut diags = Diagnostics::new(opts);
    let mut items: Vec<BibItem> = Vec::new();
    let mut keyword_lines = 0;

    for line in lines {
        let content = line.content.as_str();
        let head_end = byte_offset(content, 10);
        let head = &content[..head_end];
        let col11 = content[head_end..].chars().next().filter(|c| *c != ' ');
        let text_start = byte_offset(content, 11);
        let text = content[text_start..].trim_end();

        let mut keyword = String::from(head.trim());
        let mut pointer = col11;
        // An 11-character keyword runs through column 11.
        if let Some(c) = col11 {
            if c.is_ascii_alphabetic() && head.chars().nth(9).is_some_and(|c| c != ' ') {
                keyword.push(c);
                pointer = None;
            }
        }

        if !keyword.is_empty() {
            keyword_lines += 1;
            items.push(BibItem { keyword, pointer, text: String::from(text) });
        } else if let Some(current) = items.last() {
            if pointer.is_some() {
                let keyword = current.keyword.clone();
                items.push(BibItem { keyword, pointer, text: String::from(text) });
            } else {
                let current = items.last_mut().expect("checked above");
                current.text.push('\n');
                current.text.push_str(text);
            }
        } else {
            diags.push(
                DiagCode::DanglingContinuation,
                line.line_no,
                String::from("continuation line before any BIB keyword"),
            );
        }
    }

    diags.check_counter("BIB", &header, "keywords", header.declared.n1, keyword_lines);
    diags.check_counter("BIB", &header, "lines", header.declared.n2, lines.len());
    (BibBlock { items, declared: header.declared }, diags.list)
}

/// Parse the content records between `COMMON` and `ENDCOMMON`.
///
/// Layout is heading lines, unit lines, then value lines, each section
/// `ceil(n1 / 6)` lines long.
pub fn parse_common_block(
    header: BlockHeader,
    lines: &[RawLine],
    opts: &ParseOptions,
) -> (CommonBlock, Vec<Diagnostic>) {
    let mut diags = Diagnostics::new(opts);
    let layout = TableLayout::detect(lines, header.declared.n1);
    let value_lines = &lines[(2 * layout.span).min(lines.len())..];

    let mut values = Vec::with_capacity(layout.headings.len());
    for line in value_lines {
        collect_cells(line, &mut values, &mut diags);
    }
    check_extra_cells(&mut values, layout.headings.len(), value_lines.last(), &mut diags);
    values.resize(layout.headings.len(), None);

    if !lines.is_empty() && value_lines.len() != layout.span {
        diags.push(
            DiagCode::RaggedRow,
            header.line_no,
            format!("COMMON has {} value lines, expected {}", value_lines.len(), layout.span),
        );
    }
    diags.check_counter("COMMON", &header, "fields", header.declared.n1, layout.headings.len());
    diags.check_counter("COMMON", &header, "lines", header.declared.n2, lines.len());

    let block = CommonBlock {
        headings: layout.headings,
        units: layout.units,
        values,
        declared: header.declared,
    };
    (block, diags.list)
}

/// Parse the content records between `DATA` and `ENDDATA`.
///
/// After the heading and unit lines, every logical row spans
/// `ceil(n1 / 6)` physical lines. Blank cells are kept as missing values.
pub fn parse_data_block(
    header: BlockHeader,
    lines: &[RawLine],
    opts: &ParseOptions,
) -> (DataBlock, Vec<Diagnostic>) {
    let mut diags = Diagnostics::new(opts);
    let layout = TableLayout::detect(lines, header.declared.n1);
    let columns = layout.headings.len();
    let row_lines = &lines[(2 * layout.span).min(lines.len())..];

    let mut rows = Vec::new();
    for group in row_lines.chunks(layout.span) {
        if group.len() < layout.span {
            diags.push(
                DiagCode::RaggedRow,
                group[0].line_no,
                format!("row has {} of {} physical lines", group.len(), layout.span),
            );
        }
        let mut cells = Vec::with_capacity(columns);
        for line in group {
            // every physical line of a row holds up to six cells
            let start = cells.len();
            collect_cells(line, &mut cells, &mut diags);
            cells.resize(start + FIELDS_PER_LINE, None);
        }
        check_extra_cells(&mut cells, columns, group.last(), &mut diags);
        cells.resize(columns, None);
        rows.push(cells);
    }

    for (i, heading) in layout.headings.iter().enumerate() {
        if layout.headings[..i].contains(heading) {
            let line_no = lines.first().map_or(header.line_no, |l| l.line_no);
            diags.push(DiagCode::DuplicateColumn, line_no, format!("column heading {heading:?} repeats"));
        }
    }
    diags.check_counter("DATA", &header, "columns", header.declared.n1, columns);
    diags.check_counter("DATA", &header, "rows", header.declared.n2, rows.len());

    let block = DataBlock {
        headings: layout.headings,
        units: layout.units,
        rows,
        declared: header.declared,
    };
    (block, diags.list)
}

/// Heading/unit structure shared by COMMON and DATA blocks.
struct TableLayout {
    /// Physical lines per heading, unit, or row section.
    span: usize,
    headings: Vec<String>,
    units: Vec<String>,
}

impl TableLayout {
    /// Work out the section span from the observed text lines, falling back
    /// to the declared field count when the text is ambiguous.
    fn detect(lines: &[RawLine], declared_n1: u32) -> Self {
        let declared_span = (declared_n1 as usize).div_ceil(FIELDS_PER_LINE).max(1);
        let text_lines = lines.iter().take_while(|l| is_text_line(l)).count();
        let span = if text_lines >= 2 && text_lines % 2 == 0 {
            text_lines / 2
        } else {
            declared_span
        };

        let section = |index: usize| -> Vec<String> {
            let start = (index * span).min(lines.len());
            let end = ((index + 1) * span).min(lines.len());
            lines[start..end]
                .iter()
                .flat_map(|l| slice_fields(&l.content))
                .map(|f| String::from(f.trim()))
                .collect()
        };
        let mut headings = section(0);
        while headings.last().is_some_and(|h| h.is_empty()) {
            headings.pop();
        }
        let mut units = section(1);
        units.resize(headings.len(), String::new());
        TableLayout { span, headings, units }
    }
}

/// A line holding at least one field that is not a number.
fn is_text_line(line: &RawLine) -> bool {
    slice_fields(&line.content)
        .iter()
        .any(|f| !f.trim().is_empty() && parse_fortran_number(f).is_err())
}

fn collect_cells(line: &RawLine, cells: &mut Vec<Option<f64>>, diags: &mut Diagnostics<'_>) {
    for field in slice_fields(&line.content) {
        match parse_fortran_number(&field) {
            Ok(value) => cells.push(value),
            Err(e) => {
                diags.push(DiagCode::MalformedNumber, line.line_no, format!("{e}"));
                cells.push(None);
            }
        }
    }
}

fn check_extra_cells(
    cells: &mut Vec<Option<f64>>,
    columns: usize,
    line: Option<&RawLine>,
    diags: &mut Diagnostics<'_>,
) {
    let extra = cells.iter().skip(columns).filter(|c| c.is_some()).count();
    if extra > 0 {
        let line_no = line.map_or(0, |l| l.line_no);
        diags.push(
            DiagCode::RaggedRow,
            line_no,
            format!("{extra} value(s) beyond the {columns} declared columns"),
        );
    }
    cells.truncate(columns);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::split_line;
    use alloc::vec;

    fn lines(raw: &[&str]) -> Vec<RawLine> {
        raw.iter().enumerate().map(|(i, r)| split_line(r, i + 2).0).collect()
    }

    fn codes(diags: &[Diagnostic]) -> Vec<DiagCode> {
        diags.iter().map(|d| d.code).collect()
    }

    #[test]
    fn minimal_bib() {
        let (bib, diags) = parse_bib_block(
            BlockHeader::new(1, 1, 1),
            &lines(&["AUTHOR     (A.PERSON)"]),
            &ParseOptions::LENIENT,
        );
        assert!(diags.is_empty());
        assert_eq!(bib.items.len(), 1);
        assert_eq!(bib.items[0].keyword, "AUTHOR");
        assert_eq!(bib.items[0].pointer, None);
        assert_eq!(bib.items[0].text, "(A.PERSON)");
        assert_eq!(bib.declared, CounterPair::new(1, 1));
    }

    #[test]
    fn bib_continuation_keeps_spacing() {
        let raw = ["TITLE      Neutron scattering", "             on iron"];
        let (bib, diags) = parse_bib_block(BlockHeader::new(1, 2, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty());
        assert_eq!(bib.items.len(), 1);
        assert_eq!(bib.items[0].text, "Neutron scattering\n  on iron");
    }

    #[test]
    fn bib_counter_mismatch_still_returns_block() {
        let raw = ["TITLE      Neutron scattering", "           on iron"];
        let (bib, diags) = parse_bib_block(BlockHeader::new(2, 2, 9), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::CounterMismatch]);
        assert_eq!(diags[0].line_no, 9);
        assert!(!diags[0].is_error());
        assert_eq!(bib.items.len(), 1);

        let (_, strict) = parse_bib_block(BlockHeader::new(1, 3, 9), &lines(&raw), &ParseOptions::STRICT);
        assert_eq!(codes(&strict), [DiagCode::CounterMismatch]);
        assert!(strict[0].is_error());
    }

    #[test]
    fn bib_pointers() {
        let raw = [
            "REACTION  1(26-FE-56(N,EL)26-FE-56,,SIG)",
            "          2(26-FE-56(N,INL)26-FE-56,,SIG)",
            "            second line of pointer 2",
        ];
        let (bib, diags) = parse_bib_block(BlockHeader::new(1, 3, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(bib.items.len(), 2);
        assert_eq!(bib.items[0].pointer, Some('1'));
        assert_eq!(bib.items[1].keyword, "REACTION");
        assert_eq!(bib.items[1].pointer, Some('2'));
        assert_eq!(bib.items[1].text, "(26-FE-56(N,INL)26-FE-56,,SIG)\n second line of pointer 2");
    }

    #[test]
    fn bib_dangling_continuation() {
        let raw = ["           orphan", "AUTHOR     (A.PERSON)"];
        let (bib, diags) = parse_bib_block(BlockHeader::new(1, 2, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::DanglingContinuation]);
        assert_eq!(diags[0].line_no, 2);
        assert_eq!(bib.items.len(), 1);
    }

    #[test]
    fn minimal_common() {
        let raw = ["EN", "MEV", "1.4E+01"];
        let (common, diags) = parse_common_block(BlockHeader::new(1, 3, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(common.headings, ["EN"]);
        assert_eq!(common.units, ["MEV"]);
        assert_eq!(common.values, [Some(14.0)]);
    }

    #[test]
    fn common_with_seven_fields_wraps() {
        let raw = [
            "A          B          C          D          E          F",
            "G",
            "U1         U2         U3         U4         U5         U6",
            "U7",
            "1.         2.         3.         4.         5.         6.",
            "7.",
        ];
        let (common, diags) = parse_common_block(BlockHeader::new(7, 6, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(common.headings, ["A", "B", "C", "D", "E", "F", "G"]);
        assert_eq!(common.units[6], "U7");
        assert_eq!(common.values[6], Some(7.0));
    }

    #[test]
    fn empty_common() {
        let (common, diags) = parse_common_block(BlockHeader::new(0, 0, 1), &[], &ParseOptions::LENIENT);
        assert!(diags.is_empty());
        assert_eq!(common, CommonBlock::default());
    }

    #[test]
    fn common_field_count_mismatch() {
        let raw = ["EN", "MEV", "1.4E+01"];
        let (common, diags) = parse_common_block(BlockHeader::new(2, 3, 4), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::CounterMismatch]);
        assert_eq!(common.headings, ["EN"]);
    }

    #[test]
    fn data_two_by_two() {
        let raw = ["EN         DATA", "MEV        MB", "1.0        2.0", "3.0        4.0"];
        let (data, diags) = parse_data_block(BlockHeader::new(2, 2, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(data.headings, ["EN", "DATA"]);
        assert_eq!(data.units, ["MEV", "MB"]);
        assert_eq!(data.rows, [vec![Some(1.0), Some(2.0)], vec![Some(3.0), Some(4.0)]]);
    }

    #[test]
    fn data_blank_cell_is_missing() {
        let raw = ["EN         DATA       DATA-ERR", "MEV        MB         MB", "1.0                   0.1"];
        let (data, diags) = parse_data_block(BlockHeader::new(3, 1, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(data.rows, [vec![Some(1.0), None, Some(0.1)]]);
    }

    #[test]
    fn data_missing_row() {
        let raw = ["EN         DATA", "MEV        MB", "1.0        2.0", "3.0        4.0"];
        let (data, diags) = parse_data_block(BlockHeader::new(2, 3, 5), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::CounterMismatch]);
        assert_eq!(diags[0].line_no, 5);
        assert_eq!(data.rows.len(), 2);
    }

    #[test]
    fn data_multiline_rows_and_ragged_tail() {
        let raw = [
            "A          B          C          D          E          F",
            "G",
            "U          U          U          U          U          U",
            "U",
            "1.         2.         3.         4.         5.         6.",
            "7.",
            "8.         9.",
        ];
        let (data, diags) = parse_data_block(BlockHeader::new(7, 2, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::RaggedRow]);
        assert_eq!(data.rows.len(), 2);
        assert_eq!(data.rows[0][6], Some(7.0));
        assert_eq!(data.rows[1], [Some(8.0), Some(9.0), None, None, None, None, None]);
        assert!(data.rows.iter().all(|r| r.len() == 7));
    }

    #[test]
    fn data_malformed_cell_reported() {
        let raw = ["EN         DATA", "MEV        MB", "1.0        2.0", "3.0        4.x"];
        let (data, diags) = parse_data_block(BlockHeader::new(2, 2, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert_eq!(codes(&diags), [DiagCode::MalformedNumber]);
        assert_eq!(diags[0].line_no, 5);
        assert_eq!(data.rows[1], [Some(3.0), None]);
    }

    #[test]
    fn data_duplicate_heading_warns() {
        let raw = ["EN         DATA       DATA", "MEV        MB         MB", "1.0        2.0        3.0"];
        let (data, diags) = parse_data_block(BlockHeader::new(3, 1, 1), &lines(&raw), &ParseOptions::STRICT);
        assert_eq!(codes(&diags), [DiagCode::DuplicateColumn]);
        assert!(!diags[0].is_error());
        assert_eq!(diags[0].line_no, 2);
        assert_eq!(data.headings, ["EN", "DATA", "DATA"]);
    }

    #[test]
    fn data_without_rows() {
        let raw = ["EN         DATA", "MEV        MB"];
        let (data, diags) = parse_data_block(BlockHeader::new(2, 0, 1), &lines(&raw), &ParseOptions::LENIENT);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(data.headings.len(), 2);
        assert!(data.rows.is_empty());
    }
}
