//! Config-driven sweeps, Monte Carlo runs and the command-line front end.

pub mod cli;
pub mod config;
pub mod estimate;
pub mod output;
pub mod selftest;
pub mod sweep;

pub use config::{Axis, EstimateConfig, HarnessConfig, Scheme, ScenarioConfig, SweepConfig, REFERENCE_PRESET};
pub use estimate::{run_estimate, EstimateReport};
pub use output::{write_json, write_sweep, Format, Meta, CSV_COLUMNS};
pub use cli::run_from_args;
pub use sweep::{
    evaluate_scheme, run_crb_sweep, run_mse_sweep, run_tradeoff, trial_sq_error, RowStatus, SchemeEval, SweepResult, SweepRow,
};
