use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Index;

/// A JSON-equivalent value.
///
/// Numbers are always finite; constructors map NaN and infinities to
/// [`DocValue::Null`].
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DocValue {
    #[default]
    Null,
    Bool(bool),
    Number(f64),
    String(String),
    Array(Vec<DocValue>),
    Object(Object),
}

impl DocValue {
    pub fn number(value: f64) -> Self {
        if value.is_finite() {
            DocValue::Number(value)
        } else {
            DocValue::Null
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            DocValue::Null => "null",
            DocValue::Bool(_) => "boolean",
            DocValue::Number(_) => "number",
            DocValue::String(_) => "string",
            DocValue::Array(_) => "array",
            DocValue::Object(_) => "object",
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, DocValue::Null)
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            DocValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            DocValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            DocValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&Vec<DocValue>> {
        match self {
            DocValue::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_array_mut(&mut self) -> Option<&mut Vec<DocValue>> {
        match self {
            DocValue::Array(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&Object> {
        match self {
            DocValue::Object(o) => Some(o),
            _ => None,
        }
    }

    pub fn as_object_mut(&mut self) -> Option<&mut Object> {
        match self {
            DocValue::Object(o) => Some(o),
            _ => None,
        }
    }

    /// Member `key` of an object, `None` for anything else.
    pub fn get(&self, key: &str) -> Option<&DocValue> {
        self.as_object()?.get(key)
    }
}

impl From<bool> for DocValue {
    fn from(b: bool) -> Self {
        DocValue::Bool(b)
    }
}

impl From<f64> for DocValue {
    fn from(n: f64) -> Self {
        DocValue::number(n)
    }
}

impl From<Option<f64>> for DocValue {
    fn from(n: Option<f64>) -> Self {
        n.map_or(DocValue::Null, DocValue::number)
    }
}

impl From<&str> for DocValue {
    fn from(s: &str) -> Self {
        DocValue::String(String::from(s))
    }
}

impl From<String> for DocValue {
    fn from(s: String) -> Self {
        DocValue::String(s)
    }
}

impl From<Vec<DocValue>> for DocValue {
    fn from(a: Vec<DocValue>) -> Self {
        DocValue::Array(a)
    }
}

impl From<Object> for DocValue {
    fn from(o: Object) -> Self {
        DocValue::Object(o)
    }
}

impl<T: Into<DocValue>> FromIterator<T> for DocValue {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        DocValue::Array(iter.into_iter().map(Into::into).collect())
    }
}

/// An object with unique keys kept in insertion order.
///
/// Documents here hold a few dozen keys at most, so lookups are linear.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Object {
    members: Vec<(String, DocValue)>,
}

impl Object {
    pub fn new() -> Self {
        Object::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn position(&self, key: &str) -> Option<usize> {
        self.members.iter().position(|(k, _)| k == key)
    }

    pub fn get(&self, key: &str) -> Option<&DocValue> {
        self.position(key).map(|i| &self.members[i].1)
    }

    pub fn get_mut(&mut self, key: &str) -> Option<&mut DocValue> {
        self.position(key).map(|i| &mut self.members[i].1)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.position(key).is_some()
    }

    /// Insert or overwrite. An overwritten key keeps its position.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<DocValue>) -> Option<DocValue> {
        let key = key.into();
        let value = value.into();
        match self.position(&key) {
            Some(i) => Some(core::mem::replace(&mut self.members[i].1, value)),
            None => {
                self.members.push((key, value));
                None
            }
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<DocValue> {
        self.position(key).map(|i| self.members.remove(i).1)
    }

    /// Mutable member `key`, inserted with `default()` when absent.
    pub fn get_or_insert_with(&mut self, key: &str, default: impl FnOnce() -> DocValue) -> &mut DocValue {
        let i = match self.position(key) {
            Some(i) => i,
            None => {
                self.members.push((String::from(key), default()));
                self.members.len() - 1
            }
        };
        &mut self.members[i].1
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, &DocValue)> {
        self.members.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl ExactSizeIterator<Item = (&str, &mut DocValue)> {
        self.members.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl ExactSizeIterator<Item = &str> {
        self.members.iter().map(|(k, _)| k.as_str())
    }

    pub fn values(&self) -> impl ExactSizeIterator<Item = &DocValue> {
        self.members.iter().map(|(_, v)| v)
    }

    pub fn values_mut(&mut self) -> impl ExactSizeIterator<Item = &mut DocValue> {
        self.members.iter_mut().map(|(_, v)| v)
    }
}

impl Index<&str> for Object {
    type Output = DocValue;

    fn index(&self, key: &str) -> &DocValue {
        self.get(key).unwrap_or(&DocValue::Null)
    }
}

impl<K: Into<String>, V: Into<DocValue>> FromIterator<(K, V)> for Object {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut object = Object::new();
        for (k, v) in iter {
            object.insert(k, v);
        }
        object
    }
}

impl IntoIterator for Object {
    type Item = (String, DocValue);
    type IntoIter = alloc::vec::IntoIter<(String, DocValue)>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_keeps_order_and_uniqueness() {
        let mut o = Object::new();
        o.insert("b", 1.0);
        o.insert("a", 2.0);
        assert_eq!(o.insert("b", 3.0), Some(DocValue::Number(1.0)));
        assert_eq!(o.keys().collect::<Vec<_>>(), ["b", "a"]);
        assert_eq!(o["b"], DocValue::Number(3.0));
        assert_eq!(o["missing"], DocValue::Null);
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(DocValue::from(f64::NAN), DocValue::Null);
        assert_eq!(DocValue::from(f64::INFINITY), DocValue::Null);
        assert_eq!(DocValue::from(None::<f64>), DocValue::Null);
        assert_eq!(DocValue::from(Some(1.5)), DocValue::Number(1.5));
    }
}
