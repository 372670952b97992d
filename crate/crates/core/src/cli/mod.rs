//! Named experiments, their JSON configs and the reports they write.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, Params, OUTPUT_DIR_ENV};
pub use experiments::{evaluate, run_experiment, write_report};
pub use report::{emit_plot_data, Check, ExperimentReport, PlotData, VOCABULARY, VOCABULARY_VERSION};
