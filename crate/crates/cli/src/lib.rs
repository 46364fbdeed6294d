//! Command-line front end for `wiretap-core`.

pub mod channel_file;
pub mod commands;
pub mod error;
pub mod format;

pub use commands::{run, Cli};
pub use error::CliError;
