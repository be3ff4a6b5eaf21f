//! Command-line front end: model selection, region parsing, report
//! documents and simulation driving.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod report;

pub use args::Cli;
pub use commands::{load_tabulated, run, CliError};
pub use report::ReportDocument;
