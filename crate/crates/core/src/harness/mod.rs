//! Experiment configs, reproducible runs, CSV results and reports.

pub mod config;
pub mod output;
pub mod report;
pub mod run;

pub use config::{DecayFamily, Experiment, ExperimentConfig, SGrid};
pub use output::ResultRecord;
pub use report::{report, Report, ReportLine, Verdict};
pub use run::{execute, run};
