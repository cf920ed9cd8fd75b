//! The JSON-equivalent document tree, lossless conversion from parsed
//! entries, dotted-path access and JSON text.

mod convert;
mod json;
mod path;
mod value;

use alloc::string::String;

pub use convert::entry_to_document;
pub use json::{from_json_text, to_json_pretty, to_json_text, JsonSyntaxError};
pub use path::{get_path, set_path, set_path_mut, Path, PathError};
pub use value::{DocValue, Object};

/// A top-level document: always an object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document(Object);

impl Document {
    pub fn new(root: Object) -> Self {
        Document(root)
    }

    pub fn as_object(&self) -> &Object {
        &self.0
    }

    pub fn as_object_mut(&mut self) -> &mut Object {
        &mut self.0
    }

    pub fn into_object(self) -> Object {
        self.0
    }

    pub fn into_value(self) -> DocValue {
        DocValue::Object(self.0)
    }

    /// The string-valued `ID` member.
    pub fn id(&self) -> Option<&str> {
        self.0.get("ID")?.as_str()
    }

    pub fn get(&self, key: &str) -> Option<&DocValue> {
        self.0.get(key)
    }

    pub fn get_path(&self, path: &Path) -> Option<&DocValue> {
        path::lookup_in_object(&self.0, path.segments())
    }

    pub fn from_json(text: &str) -> Result<Document, JsonSyntaxError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("document values always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document values always serialize")
    }
}

impl TryFrom<DocValue> for Document {
    type Error = DocValue;

    fn try_from(value: DocValue) -> Result<Self, DocValue> {
        match value {
            DocValue::Object(o) => Ok(Document(o)),
            other => Err(other),
        }
    }
}

impl From<Document> for DocValue {
    fn from(doc: Document) -> DocValue {
        doc.into_value()
    }
}
