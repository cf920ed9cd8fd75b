use alloc::string::String;
use alloc::vec::Vec;

use super::{NormalizeError, NormalizeWarning};
use crate::document::{DocValue, Document, Object};

/// Appended to first-subentry field names that collide with the
/// subentry's own fields.
pub const FIRST_SUB_SUFFIX: &str = "_firstSub";

/// Split an entry document into one document per data subentry.
///
/// Each output holds `ID`, `ENTRYID` and the subentry's own fields, followed
/// by the first subentry's fields. `BIB` is merged keyword by keyword; other
/// top-level fields are merged whole. Whenever a first-subentry name is
/// already taken, it gets the `_firstSub` suffix. The first subentry and
/// `NOSUBENT` placeholders produce no document.
pub fn entry_to_subentry_documents(
    entry_doc: &Document,
) -> Result<(Vec<Document>, Vec<NormalizeWarning>), NormalizeError> {
    let entry_id = entry_doc.id().ok_or(NormalizeError::MissingId)?;
    let subentries = entry_doc
        .get("SUBENT")
        .and_then(DocValue::as_array)
        .ok_or(NormalizeError::MissingSubentries)?;

    let mut warnings = Vec::new();
    let mut real = Vec::new();
    for (index, value) in subentries.iter().enumerate() {
        match value.as_object() {
            Some(obj) if obj.get("ID").and_then(DocValue::as_str).is_some() => {
                if obj.get("NOSUBENT") != Some(&DocValue::Bool(true)) {
                    real.push((index, obj));
                }
            }
            _ => warnings.push(NormalizeWarning::MalformedSubentry { entry: String::from(entry_id), index }),
        }
    }
    if real.len() < 2 {
        warnings.push(NormalizeWarning::EmptyEntry { entry: String::from(entry_id) });
        return Ok((Vec::new(), warnings));
    }

    // The shared material only counts when it sits in the leading subentry.
    let first = real.first().filter(|(index, _)| *index == 0).map(|(_, obj)| *obj);
    let docs = real
        .iter()
        .filter(|(index, _)| *index != 0)
        .map(|(_, own)| Document::new(merge_subentry(entry_id, own, first)))
        .collect();
    Ok((docs, warnings))
}

fn merge_subentry(entry_id: &str, own: &Object, first: Option<&Object>) -> Object {
    let mut out = Object::new();
    out.insert("ID", own["ID"].clone());
    out.insert("ENTRYID", entry_id);
    for (key, value) in own.iter().filter(|(k, _)| *k != "ID") {
        out.insert(key, value.clone());
    }
    let Some(first) = first else {
        return out;
    };
    for (key, value) in first.iter().filter(|(k, _)| *k != "ID") {
        match (key, value, out.get_mut(key)) {
            ("BIB", DocValue::Object(first_bib), Some(DocValue::Object(own_bib))) => {
                for (bib_key, bib_value) in first_bib.iter() {
                    let name = free_name(own_bib, bib_key);
                    own_bib.insert(name, bib_value.clone());
                }
            }
            _ => {
                let name = free_name(&out, key);
                out.insert(name, value.clone());
            }
        }
    }
    out
}

/// `key` itself when unused, otherwise `key` with as many `_firstSub`
/// suffixes as needed to be unique.
fn free_name(taken: &Object, key: &str) -> String {
    let mut name = String::from(key);
    while taken.contains_key(&name) {
        name.push_str(FIRST_SUB_SUFFIX);
    }
    name
}

/// Append every COMMON constant to the DATA table as a constant column.
///
/// The subentry's own `COMMON` comes first, then `COMMON_firstSub`. A field
/// whose name is already a table column is skipped with a warning. Both
/// COMMON objects stay in the document. Without DATA the document is
/// returned unchanged.
pub fn merge_common_into_data(mut doc: Document) -> (Document, Vec<NormalizeWarning>) {
    let mut warnings = Vec::new();
    let subentry = String::from(doc.id().unwrap_or_default());

    let mut fields = Vec::new();
    for source in ["COMMON", "COMMON_firstSub"] {
        if let Some(common) = doc.get(source).and_then(DocValue::as_object) {
            let descr = string_items(common.get("DESCR"));
            let units = string_items(common.get("UNIT"));
            let values = common.get("VALUE").and_then(DocValue::as_array);
            for (i, name) in descr.iter().enumerate() {
                let unit = units.get(i).cloned().unwrap_or_default();
                let value = values.and_then(|v| v.get(i)).cloned().unwrap_or(DocValue::Null);
                fields.push((source, name.clone(), unit, value));
            }
        }
    }

    let Some(data) = doc.as_object_mut().get_mut("DATA").and_then(DocValue::as_object_mut) else {
        return (doc, warnings);
    };
    if fields.is_empty() {
        return (doc, warnings);
    }
    let rows = data
        .get("TABLE")
        .and_then(DocValue::as_object)
        .and_then(|t| t.values().next())
        .and_then(DocValue::as_array)
        .map_or(0, Vec::len);

    for (source, name, unit, value) in fields {
        let table = data
            .get_or_insert_with("TABLE", || DocValue::Object(Object::new()))
            .as_object_mut();
        let Some(table) = table else { break };
        if table.contains_key(&name) {
            warnings.push(NormalizeWarning::ColumnCollision {
                subentry: subentry.clone(),
                column: name,
                common: String::from(source),
            });
            continue;
        }
        table.insert(name.as_str(), DocValue::Array(alloc::vec![value; rows]));
        push_item(data, "DESCR", name.into());
        push_item(data, "UNIT", unit.into());
    }
    (doc, warnings)
}

fn string_items(value: Option<&DocValue>) -> Vec<String> {
    value
        .and_then(DocValue::as_array)
        .map(|items| items.iter().map(|v| String::from(v.as_str().unwrap_or_default())).collect())
        .unwrap_or_default()
}

fn push_item(obj: &mut Object, key: &str, item: DocValue) {
    if let Some(list) = obj.get_or_insert_with(key, || DocValue::Array(Vec::new())).as_array_mut() {
        list.push(item);
    }
}
