//! Declarative experiment runner for flat-screen scattering.
//!
//! An [`ExperimentConfig`] read from TOML fixes the screen, the incident wave
//! and every stage's parameters; each subcommand runs one stage and writes
//! CSV exports and a JSON report to the output directory.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{
    cmd_farfield, cmd_invert, cmd_solve, cmd_uniqueness, cmd_verify, FarfieldSummary,
    InversionVerdict, InvertSummary, SolveSummary, DEGENERATE_WARNING,
};
pub use config::ExperimentConfig;
pub use error::{CliError, EXIT_NUMERICAL, EXIT_VALIDATION};
