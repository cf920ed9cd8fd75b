//! File formats, storage and the command line for EXFOR data.
//!
//! The parsing, document model, normalization and query engine live in
//! [`exfor_core`]; this crate adds what needs an operating system: reading
//! input trees, the NDJSON [`store::DocumentStore`], configuration files
//! and the `exfor` binary.

pub mod cli;
pub mod config;
pub mod inputs;
pub mod pipeline;
pub mod search;
pub mod store;

pub use exfor_core as core;
pub use search::{find, find_one};
pub use store::{DocumentStore, IngestReport, StoreError};
