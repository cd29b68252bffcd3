//! Scenario files, CSV output and the subcommands behind the `preytaxis`
//! binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CliError, EXIT_CONFIG, EXIT_MATH, EXIT_OK, EXIT_RUNTIME};
pub use config::{ConfigError, LengthRange, RunConfig};
