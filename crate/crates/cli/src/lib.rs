//! Command-line pipeline: JSON design spec in, netlists, CSV curves and a
//! design report out.
//!
//! Exit codes: 0 success, 2 input or schema error, 3 computation error,
//! 4 empty gain band.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec_file;

pub use commands::{run, Cli};
pub use error::CliError;
