//! MongoDB-style filter documents.
//!
//! A query is a JSON object whose keys are dotted paths. A plain value
//! tests equality; an object of operators tests `$regex` (with optional
//! `$options`), `$lt`, `$lte`, `$gt`, `$gte` or `$exists`. All predicates
//! must hold.
//!
//! ```
//! use exfor_core::{parse_query, Document};
//!
//! let q = parse_query(r#"{"BIB.REACTION": {"$regex": "^\\(26-FE-56\\(N,"}}"#).unwrap();
//! let doc = Document::from_json(r#"{"BIB": {"REACTION": "(26-FE-56(N,EL)26-FE-56,,SIG)"}}"#).unwrap();
//! assert!(q.matches(&doc));
//! ```

mod parse;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use regex_automata::meta::Regex;

pub use parse::{parse_query, QueryError};

use crate::document::{DocValue, Document, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Lte,
    Gt,
    Gte,
}

impl CmpOp {
    pub fn apply(self, left: f64, right: f64) -> bool {
        match self {
            CmpOp::Lt => left < right,
            CmpOp::Lte => left <= right,
            CmpOp::Gt => left > right,
            CmpOp::Gte => left >= right,
        }
    }

    pub fn operator(self) -> &'static str {
        match self {
            CmpOp::Lt => "$lt",
            CmpOp::Lte => "$lte",
            CmpOp::Gt => "$gt",
            CmpOp::Gte => "$gte",
        }
    }
}

/// A compiled regular expression with search (unanchored) semantics.
#[derive(Clone)]
pub struct Pattern {
    source: String,
    options: String,
    regex: Regex,
}

impl Pattern {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn options(&self) -> &str {
        &self.options
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.options == other.options
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/{}", self.source, self.options)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Test {
    Eq(DocValue),
    Regex(Pattern),
    Cmp(CmpOp, f64),
    Exists(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathPredicate {
    pub path: Path,
    pub test: Test,
}

impl PathPredicate {
    /// Evaluate against one document. When the path resolves to an array,
    /// the test also holds if it holds for any element.
    pub fn holds(&self, doc: &Document) -> bool {
        let resolved = doc.get_path(&self.path);
        if let Test::Exists(wanted) = self.test {
            return resolved.is_some() == wanted;
        }
        let Some(value) = resolved else {
            return false;
        };
        self.test_value(value)
            || value.as_array().is_some_and(|items| items.iter().any(|item| self.test_value(item)))
    }

    fn test_value(&self, value: &DocValue) -> bool {
        match &self.test {
            Test::Eq(expected) => value == expected,
            Test::Regex(pattern) => value.as_str().is_some_and(|s| pattern.is_match(s)),
            Test::Cmp(op, bound) => value.as_f64().is_some_and(|x| op.apply(x, *bound)),
            Test::Exists(_) => unreachable!("handled in holds"),
        }
    }
}

/// A conjunction of path predicates. The empty query matches everything.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryExpr {
    pub predicates: Vec<PathPredicate>,
}

impl QueryExpr {
    pub fn matches(&self, doc: &Document) -> bool {
        self.predicates.iter().all(|p| p.holds(doc))
    }

    /// The ID when the query is exactly `{"ID": "<string>"}`, which a store
    /// can answer from its index.
    pub fn id_lookup(&self) -> Option<&str> {
        match self.predicates.as_slice() {
            [PathPredicate { path, test: Test::Eq(DocValue::String(id)) }] if path.is_key("ID") => Some(id),
            _ => None,
        }
    }
}

/// Free-function form of [`QueryExpr::matches`].
pub fn match_document(query: &QueryExpr, doc: &Document) -> bool {
    query.matches(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FE56_SIG: &str = r#"^\(26-FE-56\(N,[^)]+\)[^,]*,,SIG\)"#;

    fn doc(text: &str) -> Document {
        Document::from_json(text).unwrap()
    }

    fn regex_query(pattern: &str) -> QueryExpr {
        let text = alloc::format!(r#"{{"BIB.REACTION":{{"$regex":{}}}}}"#, serde_json::to_string(pattern).unwrap());
        parse_query(&text).unwrap()
    }

    fn reaction(r: &str) -> Document {
        doc(&alloc::format!(r#"{{"ID":"X","BIB":{{"REACTION":{}}}}}"#, serde_json::to_string(r).unwrap()))
    }

    #[test]
    fn prefix_regex() {
        let q = regex_query(r"^\(26-FE-56\(N,");
        assert!(q.matches(&reaction("(26-FE-56(N,EL)26-FE-56,,SIG)")));
        assert!(!q.matches(&reaction("(26-FE-56(P,EL)26-FE-56,,SIG)")));
    }

    #[test]
    fn angle_integrated_iron_pattern() {
        let q = regex_query(FE56_SIG);
        assert!(q.matches(&reaction("(26-FE-56(N,EL)26-FE-56,,SIG)")));
        assert!(q.matches(&reaction("(26-FE-56(N,P)25-MN-56,,SIG)")));
        assert!(!q.matches(&reaction("(26-FE-56(N,EL)26-FE-56,,DA)")));
        assert!(!q.matches(&reaction("(26-FE-56(N,INL)26-FE-56,PAR,SIG)")));
        assert!(!q.matches(&reaction("(26-FE-54(N,G)26-FE-55,,SIG)")));
        assert!(!q.matches(&reaction("X(26-FE-56(N,EL)26-FE-56,,SIG)")));
    }

    #[test]
    fn unanchored_search() {
        let q = regex_query("N,EL");
        assert!(q.matches(&reaction("(26-FE-56(N,EL)26-FE-56,,SIG)")));
    }

    #[test]
    fn empty_query_matches_anything() {
        let q = parse_query("{}").unwrap();
        assert!(q.matches(&doc("{}")));
        assert!(q.matches(&doc(r#"{"ID":"1"}"#)));
    }

    #[test]
    fn equality_is_typed() {
        let q = parse_query(r#"{"ID":"11701004"}"#).unwrap();
        assert!(q.matches(&doc(r#"{"ID":"11701004"}"#)));
        assert!(!q.matches(&doc(r#"{"ID":11701004}"#)));
        assert!(!q.matches(&doc("{}")));
        assert_eq!(q.id_lookup(), Some("11701004"));
    }

    #[test]
    fn array_fan_out() {
        let d = doc(r#"{"DATA":{"TABLE":{"EN":[1.0,5.0,null]}}}"#);
        assert!(parse_query(r#"{"DATA.TABLE.EN":{"$gt":4.5}}"#).unwrap().matches(&d));
        assert!(!parse_query(r#"{"DATA.TABLE.EN":{"$gt":5}}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"DATA.TABLE.EN":5}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"DATA.TABLE.EN":null}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"DATA.TABLE.EN":[1.0,5.0,null]}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"DATA.TABLE.EN.1":{"$gte":5,"$lte":5}}"#).unwrap().matches(&d));
    }

    #[test]
    fn comparisons_only_on_numbers() {
        let d = doc(r#"{"A":"10","B":10}"#);
        assert!(!parse_query(r#"{"A":{"$lt":100}}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"B":{"$lt":100}}"#).unwrap().matches(&d));
    }

    #[test]
    fn regex_only_on_strings() {
        let d = doc(r#"{"A":10,"B":{"C":"x"}}"#);
        assert!(!parse_query(r#"{"A":{"$regex":"1"}}"#).unwrap().matches(&d));
        assert!(!parse_query(r#"{"B":{"$regex":"x"}}"#).unwrap().matches(&d));
    }

    #[test]
    fn exists() {
        let d = doc(r#"{"A":null}"#);
        assert!(parse_query(r#"{"A":{"$exists":true}}"#).unwrap().matches(&d));
        assert!(!parse_query(r#"{"B":{"$exists":true}}"#).unwrap().matches(&d));
        assert!(parse_query(r#"{"B":{"$exists":false}}"#).unwrap().matches(&d));
    }

    #[test]
    fn case_insensitive_option() {
        let q = parse_query(r#"{"A":{"$regex":"fe-56","$options":"i"}}"#).unwrap();
        assert!(q.matches(&doc(r#"{"A":"26-FE-56"}"#)));
    }

    #[test]
    fn conjunction() {
        let q = parse_query(r#"{"A":1,"B":{"$exists":true}}"#).unwrap();
        assert!(q.matches(&doc(r#"{"A":1,"B":2}"#)));
        assert!(!q.matches(&doc(r#"{"A":1}"#)));
        assert_eq!(q.id_lookup(), None);
    }
}
