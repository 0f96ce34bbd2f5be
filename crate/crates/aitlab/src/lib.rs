//! Std companion to `aitlab-core`: command-line interface, binary table
//! cache, CSV/JSON report formats, and the pinned experiment suite.

pub mod cache;
pub mod cli;
pub mod report;
pub mod suite;
