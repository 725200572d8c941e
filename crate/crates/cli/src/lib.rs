//! Command-line front end: config parsing, CSV output and the `scan`,
//! `dressed`, `sweep` and `validate` subcommands.

pub mod app;
pub mod config;
pub mod csv;
pub mod validate;

pub use app::run;
pub use config::{parse_config, ConfigError, SimulationConfig};
pub use csv::emit_csv;
