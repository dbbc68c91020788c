//! Experiment driver for quaternionic Kuramoto oscillators: JSON experiment
//! files, the `simulate`, `orbit`, `equilibria`, `sweep` and `regime`
//! commands, and reproducible CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use config::{ExperimentConfig, Mode, Overrides};
pub use error::{CliError, ExitCode};
