//! File formats, reports and the `kbc` command-line driver built on
//! [`kbc_core`].

pub mod checkpoint;
pub mod cli;
pub mod constraints;
pub mod error;
pub mod logs;
pub mod manifest;
pub mod report;
pub mod rules_file;
pub mod tsv;

pub use error::FormatError;
