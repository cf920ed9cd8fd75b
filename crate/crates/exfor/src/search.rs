//! Query evaluation over a [`DocumentStore`].

use exfor_core::document::Document;
use exfor_core::query::QueryExpr;

use crate::store::{DocumentStore, Scan, StoreError};

/// Matching documents in scan order. Corrupt lines come through as errors.
pub fn find<'a>(store: &'a DocumentStore, query: &'a QueryExpr) -> Find<'a> {
    Find { scan: store.scan(), query }
}

/// The first match, or the first corrupt line met before it. A query that
/// is exactly `{"ID": "..."}` is answered from the index without scanning.
pub fn find_one(store: &DocumentStore, query: &QueryExpr) -> Result<Option<Document>, StoreError> {
    if let Some(id) = query.id_lookup() {
        return store.get_by_id(id);
    }
    find(store, query).next().transpose()
}

#[derive(Debug)]
pub struct Find<'a> {
    scan: Scan<'a>,
    query: &'a QueryExpr,
}

impl Iterator for Find<'_> {
    type Item = Result<Document, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        for item in self.scan.by_ref() {
            match item {
                Ok(doc) if !self.query.matches(&doc) => continue,
                other => return Some(other),
            }
        }
        None
    }
}
