//! Command-line harness for the spin-register cooling simulator: declarative
//! run configs, bundled presets, and deterministic CSV output with a manifest
//! next to every data file.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;
pub mod sweep;

pub use commands::{cmd_compare, cmd_limit, cmd_simulate, cmd_sweep, CommandError, RunOutcome};
pub use config::{parse_config, RunConfig};
pub use presets::{preset_body, preset_names};
pub use sweep::{run_sweep, SweepRecord, SweepResult};
