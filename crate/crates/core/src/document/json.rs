use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::de::{self, Deserialize, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::{Serialize, SerializeMap, Serializer};

use super::{DocValue, Document, Object};

/// Malformed JSON text, or JSON that does not fit the document model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("JSON syntax error: {message}")]
pub struct JsonSyntaxError {
    pub message: String,
}

impl From<serde_json::Error> for JsonSyntaxError {
    fn from(e: serde_json::Error) -> Self {
        JsonSyntaxError { message: format!("{e}") }
    }
}

/// Compact single-line JSON. Key order follows insertion order.
pub fn to_json_text(value: &DocValue) -> String {
    serde_json::to_string(value).expect("document values always serialize")
}

pub fn to_json_pretty(value: &DocValue) -> String {
    serde_json::to_string_pretty(value).expect("document values always serialize")
}

/// Parse JSON text. Duplicate object keys are rejected.
pub fn from_json_text(text: &str) -> Result<DocValue, JsonSyntaxError> {
    Ok(serde_json::from_str(text)?)
}

impl Serialize for DocValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DocValue::Null => serializer.serialize_unit(),
            DocValue::Bool(b) => serializer.serialize_bool(*b),
            DocValue::Number(n) if n.is_finite() => serializer.serialize_f64(*n),
            DocValue::Number(_) => serializer.serialize_unit(),
            DocValue::String(s) => serializer.serialize_str(s),
            DocValue::Array(a) => a.serialize(serializer),
            DocValue::Object(o) => o.serialize(serializer),
        }
    }
}

impl Serialize for Object {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.len()))?;
        for (k, v) in self.iter() {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Document {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.as_object().serialize(serializer)
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = DocValue;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a JSON value")
    }

    fn visit_unit<E>(self) -> Result<DocValue, E> {
        Ok(DocValue::Null)
    }

    fn visit_none<E>(self) -> Result<DocValue, E> {
        Ok(DocValue::Null)
    }

    fn visit_bool<E>(self, v: bool) -> Result<DocValue, E> {
        Ok(DocValue::Bool(v))
    }

    fn visit_i64<E>(self, v: i64) -> Result<DocValue, E> {
        Ok(DocValue::Number(v as f64))
    }

    fn visit_u64<E>(self, v: u64) -> Result<DocValue, E> {
        Ok(DocValue::Number(v as f64))
    }

    fn visit_f64<E>(self, v: f64) -> Result<DocValue, E> {
        Ok(DocValue::number(v))
    }

    fn visit_str<E>(self, v: &str) -> Result<DocValue, E> {
        Ok(DocValue::String(String::from(v)))
    }

    fn visit_string<E>(self, v: String) -> Result<DocValue, E> {
        Ok(DocValue::String(v))
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<DocValue, A::Error> {
        let mut items = Vec::with_capacity(seq.size_hint().unwrap_or(0));
        while let Some(item) = seq.next_element()? {
            items.push(item);
        }
        Ok(DocValue::Array(items))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<DocValue, A::Error> {
        let mut object = Object::new();
        while let Some(key) = map.next_key::<String>()? {
            if object.contains_key(&key) {
                return Err(de::Error::custom(format_args!("duplicate key {key:?}")));
            }
            let value: DocValue = map.next_value()?;
            object.insert(key, value);
        }
        Ok(DocValue::Object(object))
    }
}

impl<'de> Deserialize<'de> for DocValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ValueVisitor)
    }
}

impl<'de> Deserialize<'de> for Document {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match DocValue::deserialize(deserializer)? {
            DocValue::Object(o) => Ok(Document::new(o)),
            other => Err(de::Error::custom(format_args!(
                "expected a JSON object, found {}",
                other.type_name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn id_round_trips_byte_identically() {
        let text = r#"{"ID":"11701004"}"#;
        let value = from_json_text(text).unwrap();
        assert_eq!(to_json_text(&value), text);
    }

    #[test]
    fn numbers_render_plainly() {
        let value = DocValue::Array(alloc::vec![14.0.into(), 0.5.into(), 1.0e-7.into(), DocValue::Null]);
        let text = to_json_text(&value);
        assert_eq!(text, "[14.0,0.5,1e-7,null]");
        assert_eq!(from_json_text(&text).unwrap(), value);
    }

    #[test]
    fn key_order_preserved() {
        let text = r#"{"z":1.0,"a":{"y":[true,false],"b":"x"}}"#;
        assert_eq!(to_json_text(&from_json_text(text).unwrap()), text);
    }

    #[test]
    fn malformed_text() {
        assert!(from_json_text("{").is_err());
        assert!(from_json_text(r#"{"a":1,}"#).is_err());
        assert!(from_json_text("// c\n{}").is_err());
    }

    #[test]
    fn duplicate_keys_rejected() {
        let err = from_json_text(r#"{"a":1,"a":2}"#).unwrap_err();
        assert!(err.message.contains("duplicate key"));
    }

    #[test]
    fn document_must_be_object() {
        assert!(serde_json::from_str::<Document>("[1]").is_err());
        let doc: Document = serde_json::from_str(r#"{"ID":"X"}"#).unwrap();
        assert_eq!(doc.id(), Some("X"));
    }

    fn arb_value() -> impl Strategy<Value = DocValue> {
        let leaf = prop_oneof![
            Just(DocValue::Null),
            any::<bool>().prop_map(DocValue::Bool),
            any::<f64>().prop_map(DocValue::number),
            "\\PC{0,8}".prop_map(DocValue::String),
        ];
        leaf.prop_recursive(4, 32, 6, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..5).prop_map(DocValue::Array),
                proptest::collection::vec(("[A-Z_]{1,6}", inner), 0..5)
                    .prop_map(|members| DocValue::Object(members.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(value in arb_value()) {
            let text = to_json_text(&value);
            prop_assert_eq!(&from_json_text(&text).unwrap(), &value);
            prop_assert_eq!(from_json_text(&to_json_pretty(&value)).unwrap(), value);
        }
    }
}
