//! Experiment driver: configuration, single runs, sweeps and CSV reports.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::{CflPolicy, ExperimentConfig, Scheme};
pub use report::{emit_csv, fit_slope, local_slopes, ErrorReport, ReportRow, SlopeFit, CSV_HEADER};
pub use run::{integrate, reference_density, relative_error, run_scheme, RunOutput, Setup};
pub use sweep::{sweep_dt, sweep_epsilon, uniform_study};
