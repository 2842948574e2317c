//! Command-line front end for the sharplab verification suites.
//!
//! A run is described by a TOML [`RunConfig`]; [`run_suite`] evaluates every
//! check of the selected suite and the [`output`] writers emit CSV, JSON, a
//! human-readable summary and plot series.

pub mod config;
pub mod output;
pub mod suites;

pub use config::{parse_config, render_config, ConfigError, RunConfig, Suite};
pub use output::{emit_plot_data, write_outputs};
pub use suites::{run_suite, CheckRow, Criterion, SuiteResult};
