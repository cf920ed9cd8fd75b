use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{DocValue, Document, Object};
use crate::syntax::{BibBlock, CommonBlock, DataBlock, ExforEntry, ExforSubentry};

/// Convert a parsed entry into its document form.
///
/// ```text
/// { ID, SUBENT: [ { ID,
///                   BIB:    { KEYWORD: text | { pointer: text } },
///                   COMMON: { DESCR: [..], UNIT: [..], VALUE: [..] },
///                   DATA:   { DESCR: [..], UNIT: [..], TABLE: { heading: [..] } } } ] }
/// ```
///
/// Blocks absent from the subentry are omitted. `NOSUBENT` records become
/// `{ ID, NOSUBENT: true }`. Repeated DATA headings get `#2`, `#3`, ...
/// suffixes in `TABLE`; `DESCR` keeps the original headings, so columns
/// line up with `DESCR` by position.
pub fn entry_to_document(entry: &ExforEntry) -> Document {
    let mut root = Object::new();
    root.insert("ID", entry.entry_id.as_str());
    let subentries: Vec<DocValue> = entry.subentries.iter().map(|s| subentry_object(s).into()).collect();
    root.insert("SUBENT", subentries);
    Document::new(root)
}

fn subentry_object(sub: &ExforSubentry) -> Object {
    let mut obj = Object::new();
    obj.insert("ID", sub.subent_id.as_str());
    if sub.is_nosubent {
        obj.insert("NOSUBENT", true);
        return obj;
    }
    if let Some(bib) = &sub.bib {
        obj.insert("BIB", bib_object(bib));
    }
    if let Some(common) = &sub.common {
        obj.insert("COMMON", common_object(common));
    }
    if let Some(data) = &sub.data {
        obj.insert("DATA", data_object(data));
    }
    obj
}

/// A keyword with a single pointer-less item maps to its text. Otherwise the
/// keyword maps to an object keyed by pointer, `""` standing for no pointer.
fn bib_object(bib: &BibBlock) -> Object {
    let mut obj = Object::new();
    for item in &bib.items {
        let plain = bib
            .items
            .iter()
            .filter(|other| other.keyword == item.keyword)
            .all(|other| other.pointer.is_none());
        if plain {
            match obj.get_mut(&item.keyword) {
                Some(DocValue::String(text)) => {
                    text.push('\n');
                    text.push_str(&item.text);
                }
                _ => {
                    obj.insert(item.keyword.as_str(), item.text.as_str());
                }
            }
            continue;
        }
        let mut pointer_key = String::new();
        if let Some(p) = item.pointer {
            pointer_key.push(p);
        }
        let by_pointer = obj
            .get_or_insert_with(&item.keyword, || DocValue::Object(Object::new()))
            .as_object_mut()
            .expect("pointered keywords map to objects");
        match by_pointer.get_mut(&pointer_key) {
            Some(DocValue::String(text)) => {
                text.push('\n');
                text.push_str(&item.text);
            }
            _ => {
                by_pointer.insert(pointer_key, item.text.as_str());
            }
        }
    }
    obj
}

fn strings(items: &[String]) -> DocValue {
    items.iter().map(String::as_str).collect()
}

fn common_object(common: &CommonBlock) -> Object {
    let mut obj = Object::new();
    obj.insert("DESCR", strings(&common.headings));
    obj.insert("UNIT", strings(&common.units));
    obj.insert("VALUE", common.values.iter().copied().collect::<DocValue>());
    obj
}

fn data_object(data: &DataBlock) -> Object {
    let mut table = Object::new();
    for (col, heading) in data.headings.iter().enumerate() {
        let column: DocValue = data.rows.iter().map(|row| row.get(col).copied().flatten()).collect();
        table.insert(unique_key(&table, heading), column);
    }
    let mut obj = Object::new();
    obj.insert("DESCR", strings(&data.headings));
    obj.insert("UNIT", strings(&data.units));
    obj.insert("TABLE", table);
    obj
}

fn unique_key(table: &Object, heading: &str) -> String {
    if !table.contains_key(heading) {
        return String::from(heading);
    }
    (2..)
        .map(|n| format!("{heading}#{n}"))
        .find(|key| !table.contains_key(key))
        .expect("unbounded suffix range")
}
