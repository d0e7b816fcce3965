//! Command-line companion to the core solver library: configuration
//! parsing, initial-data expressions, file output, and run orchestration.

pub mod config;
pub mod expr;
pub mod frames;
pub mod report;
pub mod run;
