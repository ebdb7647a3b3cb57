//! File formats, chain archives, training reports and the `haarnet`
//! command-line tool built on `haarnet-core`.

pub mod archive;
pub mod bench;
pub mod binio;
pub mod checkpoint;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod matrix_file;
pub mod pointpattern;
pub mod report;
pub mod sweep;
pub mod text;
pub mod tu;

pub use error::{Error, Location, Result};
