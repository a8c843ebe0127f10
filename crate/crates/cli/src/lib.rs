//! Command-line front end for the chore-market solver.

pub mod commands;
pub mod error;
pub mod exact;
pub mod files;
pub mod plot;

pub use commands::{run, Cli};
pub use error::CliError;
