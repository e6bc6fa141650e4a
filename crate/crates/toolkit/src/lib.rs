//! File format, corpus generation and law suites for the `morita` tool.

pub mod corpus;
pub mod format;
pub mod mutations;
pub mod suite;
