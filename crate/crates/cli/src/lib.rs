//! The `cgf` command-line tool: verification, approximation and plotting
//! on JSON descriptions of cut-generating functions and S-free polyhedra.
//!
//! Exit codes: 0 success, 1 a check came out false, 2 bad usage or input,
//! 3 a pipeline failed.

pub mod args;
mod commands;
pub mod error;
pub mod plot;

pub use args::Cli;
pub use commands::{read_json, run, Outcome, RunReport};
pub use error::{CliError, CliResult};
