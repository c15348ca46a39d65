//! File formats, corpus generation, the brute-force oracle and the property
//! self-test behind the command-line tool.

pub mod commands;
pub mod corpus;
pub mod document;
pub mod oracle;
pub mod report;
pub mod selftest;

pub use corpus::{analytic_family, corpus, CorpusEntry, Family};
pub use document::{DocumentError, SystemDocument, SCHEMA_VERSION};
pub use oracle::oracle_index;
pub use report::ReportDocument;
pub use selftest::{run_selftest, SelftestOptions, SelftestReport};
