//! Parsing, document conversion, normalization and query matching for
//! EXFOR experimental nuclear reaction data.
//!
//! The crate is `no_std` and only needs an allocator. File access, the
//! document store and the command line live in the companion `exfor` crate.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`syntax`] lexes the fixed-width exchange format into an
//!    [`ExforEntry`](syntax::ExforEntry) tree and reports structural
//!    [`Diagnostic`](syntax::Diagnostic)s such as counter mismatches.
//! 2. [`document`] turns the tree into a JSON-equivalent [`DocValue`](document::DocValue)
//!    without losing any keyword, heading, unit or value.
//! 3. [`normalize`] splits an entry document into self-contained subentry
//!    documents, merges the first subentry into the others, broadcasts
//!    COMMON constants into the data table and converts energies to MeV and
//!    cross sections to millibarn.
//! 4. [`query`] evaluates MongoDB-style filter documents against the result.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod document;
pub mod normalize;
pub mod query;
pub mod syntax;

pub use document::{DocValue, Document, Object, Path};
pub use normalize::{normalize_entry, UnitRule, UnitTable};
pub use query::{parse_query, QueryExpr};


pub use syntax::{parse_entry, parse_stream, Diagnostic, ExforEntry, ParseOptions, Severity};
