//! Batch front end for the decoherence library: scenario configs, evolution
//! runs with CSV output, verification batteries and generator comparisons.

pub mod commands;
pub mod config;
pub mod output;
pub mod scenario;

pub use commands::{cmd_compare, cmd_run, cmd_verify, CliError, Options};
pub use config::{parse_config, render_config, Parsed, ScenarioConfig};
