#![forbid(unsafe_code)]

//! Batch experiment driver for the fractional p-Laplacian toolkit: a TOML
//! configuration schema, a preset registry for problem data, and runners
//! that solve, verify, and sweep with deterministic CSV outputs.

pub mod config;
pub mod error;
pub mod experiment;
pub mod presets;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiment::{
    run_evaluate, run_experiment, sweep, ExperimentOutcome, SweepOutcome, CHECK_REGISTRY,
    SWEEP_AXES,
};
pub use presets::PresetCfg;
