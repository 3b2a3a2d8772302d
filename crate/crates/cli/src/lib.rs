//! Command line front end of the constrained oscillator: flat config files,
//! CSV/JSON output and parallel sweeps over the `constrained-oscillator-core`
//! routines.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run_command, Report};
pub use config::{Command, RunConfig};
pub use error::CliError;
