//! Experiment harness: configuration files, the trial runner, CSV records,
//! least-squares fits, and SVG plots. The CLI verbs are thin wrappers over
//! this module.

pub mod config;
pub mod fit;
pub mod plot;
pub mod records;
pub mod runner;

pub use config::{ExperimentKind, ExperimentSpec, FitKind, FitSpec, SCHEMA_VERSION};
pub use fit::{effective_distance, fit_loglog_exponent, fit_power_law};
pub use records::{read_csv, records_to_csv, trial_seed, write_csv, ResultRecord, CSV_HEADER};
pub use runner::{
    run_demo, run_ground_state_stats, run_scaling, run_threshold, run_trials, scaling_points,
    summarize, threshold_bracket, CellSummary, DemoArtifacts,
};
