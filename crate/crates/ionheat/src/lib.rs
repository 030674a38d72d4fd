//! Scenario runner around [`ionheat_core`].
//!
//! A [`Scenario`] fixes the physical parameters, the initial Fock state, a
//! time grid and the engines to run (exact solution, quantum-jump ensemble,
//! memoryless reference). [`run_scenario`] executes it, writes one CSV per
//! engine plus a wide combined CSV and a text report, and returns a
//! [`ComparisonReport`].

pub mod config;
pub mod csv_io;
pub mod parallel;
pub mod presets;
pub mod report;
pub mod run;

pub use config::{parse_config, ConfigError, Engine, GridSpec, Scenario, SimOverrides, Spacing};
pub use presets::{preset, presets};
pub use report::{ComparisonReport, ComparisonRow, PowerFit, Summary};
pub use run::{run_scenario, RunError, RunOptions, RunOutcome};

/// Build identifier baked in at compile time.
pub const BUILD_ID: &str = env!("IONHEAT_BUILD_ID");
