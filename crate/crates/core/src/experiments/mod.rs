//! Experiment orchestration: config ingestion, sweeps, CSV output and the
//! validation suite.

mod config;
mod csv;
mod sweep;
mod validation;

pub use config::{parse_config, ExperimentConfig, SweepAxis, DEFAULT_CONFIG};
pub use csv::{format_float, sweep_csv, validation_csv, INVALID};
pub use sweep::{run_achievable_sweep, run_upper_bound_sweep, SweepRow};
pub use validation::{
    run_validation_suite, Property, PropertyOutcome, ValidationOptions, ALL_PROPERTIES,
};
