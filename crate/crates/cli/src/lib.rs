//! Support code for the `legq` command-line tool.

pub mod bench;
pub mod report;
pub mod rulefile;
