use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{DiagCode, Diagnostic, ParseOptions};

pub const FIELD_WIDTH: usize = 11;
pub const FIELDS_PER_LINE: usize = 6;
/// Columns 1-66.
pub const CONTENT_WIDTH: usize = FIELD_WIDTH * FIELDS_PER_LINE;
/// Columns 67-80.
const IDENT_WIDTH: usize = 14;

/// One physical line split into its content and identification areas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLine {
    pub content: String,
    pub ident: String,
    pub line_no: usize,
}

impl RawLine {
    /// Fields of the content area, see [`slice_fields`].
    pub fn fields(&self) -> Vec<String> {
        slice_fields(&self.content)
    }

    /// Field `index` (0-based), or all blanks when the line is shorter.
    pub fn field(&self, index: usize) -> &str {
        let start = byte_offset(&self.content, index * FIELD_WIDTH);
        let end = byte_offset(&self.content, (index + 1) * FIELD_WIDTH);
        &self.content[start..end]
    }

    pub fn is_blank(&self) -> bool {
        self.content.trim().is_empty()
    }
}

/// Byte offset of the `chars`-th character, clamped to the string length.
pub(crate) fn byte_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(i, _)| i)
}

/// Split a physical line (without its newline) at column 66.
///
/// Lines shorter than 66 columns are accepted as-is. Anything past column 80
/// is dropped and reported as `LineTooLong`.
pub fn split_line(raw: &str, line_no: usize) -> (RawLine, Option<Diagnostic>) {
    let raw = raw.strip_suffix('\r').unwrap_or(raw);
    let cut = byte_offset(raw, CONTENT_WIDTH);
    let (content, rest) = raw.split_at(cut);
    let ident_end = byte_offset(rest, IDENT_WIDTH);
    let total = raw.chars().count();
    let diag = (total > CONTENT_WIDTH + IDENT_WIDTH).then(|| {
        Diagnostic::new(
            DiagCode::LineTooLong,
            line_no,
            format!("line has {total} columns, only 80 are allowed"),
            &ParseOptions::LENIENT,
        )
    });
    let line = RawLine {
        content: String::from(content),
        ident: String::from(&rest[..ident_end]),
        line_no,
    };
    (line, diag)
}

/// Cut content into 11-column fields, each right-padded to full width.
///
/// At most six fields are returned; empty content yields none.
pub fn slice_fields(content: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut chars = content.chars().peekable();
    while chars.peek().is_some() && fields.len() < FIELDS_PER_LINE {
        let mut field: String = chars.by_ref().take(FIELD_WIDTH).collect();
        let width = field.chars().count();
        field.extend(core::iter::repeat_n(' ', FIELD_WIDTH - width));
        fields.push(field);
    }
    fields
}
