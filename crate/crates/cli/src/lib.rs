//! Orchestration layer for fair representation CCA experiments: data
//! ingestion, multi-seed evaluation with frozen hyperparameters, the paired
//! hypothesis suite, the timing harness, and report emission.

pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod hypothesis;
pub mod report;

pub use config::{
    ClassifierKind, CsvPaths, DataSource, ExperimentConfig, FitConfig, HypothesisConfig, Method,
    SearchSettings, TransformConfig,
};
pub use data::{ingest_csv, load_source, Dataset};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, stratified_split, ExperimentOutput, Modality, RunRecord};
pub use hypothesis::{run_hypothesis_suite, HypothesisOutput};
pub use report::{write_experiment, write_hypothesis, OutputFormat};
