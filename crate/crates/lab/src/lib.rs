//! File formats, report documents and the command line for `randers-core`.

pub mod cli;
pub mod commands;
pub mod document;
pub mod error;
pub mod input;
pub mod json;
pub mod metric_file;
pub mod termdiff;

pub use error::{LabError, Result};
