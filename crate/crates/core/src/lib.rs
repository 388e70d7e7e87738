//! In-memory columnar property-graph storage with a factorized list-based
//! query processor and a tuple-at-a-time baseline executor.

pub mod bench;
pub mod catalog;
pub mod compression;
pub mod data;
pub mod exec;
pub mod gen;
pub mod ids;
pub mod ingest;
pub mod lbp;
pub mod query;
pub mod storage;
pub mod value;
pub mod volcano;
