//! Subcommand implementations behind the `cpatchbls` binary.

pub mod commands;
pub mod synth;

pub use commands::{Cli, CliError, Command};
