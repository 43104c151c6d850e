//! Config-driven runner for the oscillab experiments.
//!
//! A run reads one config, executes one experiment and writes
//! `results.csv` and `manifest.json` into the output directory.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_with, ConfigError, Experiment, ExperimentConfig};
pub use run::{run, RunReport};
