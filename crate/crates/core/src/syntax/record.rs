use super::RawLine;

/// Kind of a physical record, decided by its first field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Entry,
    Subent,
    NoSubent,
    Bib,
    EndBib,
    NoBib,
    Common,
    EndCommon,
    NoCommon,
    Data,
    EndData,
    NoData,
    EndSubent,
    EndEntry,
    /// `TRANS` / `ENDTRANS` transmission envelope, skipped.
    Trans,
    EndTrans,
    /// Other system identifiers (dictionary and request envelopes), skipped
    /// with a warning.
    OtherSystem,
    Content,
}

impl RecordKind {
    pub fn is_system(self) -> bool {
        self != RecordKind::Content
    }
}

/// Classify a line by the keyword in its first 11-column field.
pub fn classify_record(line: &RawLine) -> RecordKind {
    match line.field(0).trim_end() {
        "ENTRY" => RecordKind::Entry,
        "SUBENT" => RecordKind::Subent,
        "NOSUBENT" => RecordKind::NoSubent,
        "BIB" => RecordKind::Bib,
        "ENDBIB" => RecordKind::EndBib,
        "NOBIB" => RecordKind::NoBib,
        "COMMON" => RecordKind::Common,
        "ENDCOMMON" => RecordKind::EndCommon,
        "NOCOMMON" => RecordKind::NoCommon,
        "DATA" => RecordKind::Data,
        "ENDDATA" => RecordKind::EndData,
        "NODATA" => RecordKind::NoData,
        "ENDSUBENT" => RecordKind::EndSubent,
        "ENDENTRY" => RecordKind::EndEntry,
        "TRANS" => RecordKind::Trans,
        "ENDTRANS" => RecordKind::EndTrans,
        "REQUEST" | "ENDREQUEST" | "DICTION" | "ENDDICTION" | "LIB" | "ENDLIB" | "DICTION-DB" => {
            RecordKind::OtherSystem
        }
        _ => RecordKind::Content,
    }
}
