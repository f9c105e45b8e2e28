//! Configuration, ensembles and experiments.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod output;
pub mod reports;

pub use config::{AnalysisConfig, ExperimentConfig, Level};
pub use experiments::{run_linear_experiment, run_nonlinear_experiment, Check, ExperimentReport, ExperimentSummary};
pub use manifest::{load_config_or_manifest, RunManifest};
pub use reports::{calibrate_estimator, field_dimension, run_comparison, verify_lemmas, ComparisonReport, LemmaReport};
