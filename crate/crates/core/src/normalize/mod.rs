//! Turn entry documents into self-contained subentry documents.
//!
//! Each data subentry becomes one document. The first subentry, which holds
//! the bibliography and constants shared by the whole entry, is merged into
//! every other subentry. COMMON constants are broadcast into the DATA table
//! as constant columns while the COMMON object itself stays in place.
//! Finally energies are expressed in MeV and cross sections in millibarn.

mod merge;
mod standardize;
mod units;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use merge::{entry_to_subentry_documents, merge_common_into_data, FIRST_SUB_SUFFIX};
pub use standardize::standardize_units;
pub use units::{unit_conversion_rule, UnitRule, UnitTable, UnitTableError};

use crate::document::Document;

/// Entry document shape violations that stop normalization.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("entry document has no string ID")]
    MissingId,
    #[error("entry document has no SUBENT array")]
    MissingSubentries,
}

/// Something normalization worked around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeWarning {
    /// Fewer than two real subentries: nothing to produce.
    EmptyEntry { entry: String },
    /// A COMMON field was not broadcast because the table already has a
    /// column of that name.
    ColumnCollision { subentry: String, column: String, common: String },
    /// A SUBENT element that is not an object, or lacks a string ID.
    MalformedSubentry { entry: String, index: usize },
}

impl fmt::Display for NormalizeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizeWarning::EmptyEntry { entry } => {
                write!(f, "entry {entry} has fewer than two subentries; no documents produced")
            }
            NormalizeWarning::ColumnCollision { subentry, column, common } => write!(
                f,
                "subentry {subentry}: {common} field {column} not broadcast, DATA already has that column"
            ),
            NormalizeWarning::MalformedSubentry { entry, index } => {
                write!(f, "entry {entry}: SUBENT element {index} is not a subentry object")
            }
        }
    }
}

/// The full pipeline: split and merge, broadcast COMMON, standardize units.
pub fn normalize_entry(
    entry_doc: &Document,
    units: &UnitTable,
) -> Result<(Vec<Document>, Vec<NormalizeWarning>), NormalizeError> {
    let (subdocs, mut warnings) = entry_to_subentry_documents(entry_doc)?;
    let docs = subdocs
        .into_iter()
        .map(|doc| {
            let (doc, w) = merge_common_into_data(doc);
            warnings.extend(w);
            standardize_units(doc, units)
        })
        .collect();
    Ok((docs, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{entry_to_document, DocValue, Path};
    use crate::syntax::{parse_entry, ParseOptions};

    const ENTRY: &str = "\
ENTRY            T0002   20260101
SUBENT        T0002001   20260101
BIB                  2          2
AUTHOR     (A.PERSON)
HISTORY    (20260101C)
ENDBIB               2
COMMON               1          3
EN-RSL
KEV
50.
ENDCOMMON            3
ENDSUBENT            4
SUBENT        T0002002   20260101
BIB                  2          2
REACTION   (26-FE-56(N,EL)26-FE-56,,SIG)
HISTORY    (20260202A)
ENDBIB               2
COMMON               1          3
EN
KEV
500.
ENDCOMMON            3
DATA                 2          3
ANG        DATA
ADEG       B
30.        1.5
60.        1.2
90.
ENDDATA              5
ENDSUBENT            9
SUBENT        T0002003   20260101
BIB                  1          1
REACTION   (26-FE-56(N,INL)26-FE-56,,SIG)
ENDBIB               1
NOCOMMON
NODATA
ENDSUBENT            3
ENDENTRY             3
";

    fn normalized() -> Vec<Document> {
        let (entry, diags) = parse_entry(ENTRY, &ParseOptions::STRICT).unwrap();
        assert!(diags.is_empty(), "{diags:?}");
        let doc = entry_to_document(&entry);
        let (docs, warnings) = normalize_entry(&doc, &UnitTable::default()).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        docs
    }

    fn at<'a>(doc: &'a Document, path: &str) -> Option<&'a DocValue> {
        doc.get_path(&Path::parse(path).unwrap())
    }

    #[test]
    fn pipeline_over_fixture() {
        let docs = normalized();
        assert_eq!(docs.len(), 2);
        let d = &docs[0];
        assert_eq!(d.id(), Some("T0002002"));
        assert_eq!(at(d, "ENTRYID"), Some(&"T0002".into()));
        assert_eq!(at(d, "BIB.AUTHOR"), Some(&"(A.PERSON)".into()));
        assert_eq!(at(d, "BIB.HISTORY"), Some(&"(20260202A)".into()));
        assert_eq!(at(d, "BIB.HISTORY_firstSub"), Some(&"(20260101C)".into()));

        // broadcast columns are appended, then converted with the rest
        let descr: Vec<_> = at(d, "DATA.DESCR").unwrap().as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(descr, ["ANG", "DATA", "EN", "EN-RSL"]);
        let units: Vec<_> = at(d, "DATA.UNIT").unwrap().as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        assert_eq!(units, ["ADEG", "MB", "MEV", "MEV"]);
        let en: Vec<_> = at(d, "DATA.TABLE.EN").unwrap().as_array().unwrap().clone();
        assert_eq!(en, [DocValue::Number(0.5), DocValue::Number(0.5), DocValue::Number(0.5)]);
        let xs = at(d, "DATA.TABLE.DATA").unwrap().as_array().unwrap();
        assert_eq!(xs, &[DocValue::Number(1500.0), DocValue::Number(1200.0), DocValue::Null]);
        assert_eq!(at(d, "DATA.TABLE.ANG.2"), Some(&DocValue::Number(90.0)));

        // both COMMON blocks stay, standardized
        assert_eq!(at(d, "COMMON.UNIT.0"), Some(&"MEV".into()));
        assert_eq!(at(d, "COMMON.VALUE.0"), Some(&DocValue::Number(0.5)));
        assert_eq!(at(d, "COMMON_firstSub.VALUE.0"), Some(&DocValue::Number(0.05)));
    }

    #[test]
    fn bib_only_subentry_has_no_data() {
        let docs = normalized();
        let d = &docs[1];
        assert_eq!(d.id(), Some("T0002003"));
        assert!(d.get("DATA").is_none());
        // first-subentry COMMON arrives without collision under its own name
        assert_eq!(at(d, "COMMON.DESCR.0"), Some(&"EN-RSL".into()));
        assert_eq!(at(d, "BIB.HISTORY"), Some(&"(20260101C)".into()));
    }
}
