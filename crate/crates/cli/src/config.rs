//! Configuration schemas for the subcommands, deserialized from `--config`
//! JSON documents.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use faircca_core::classify::{Scorer, SvmParams};
use faircca_core::SynthConfig;

use crate::error::{CliError, Result};

/// Where the experiment data comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Synth(SynthConfig),
    Csv(CsvPaths),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvPaths {
    pub x: PathBuf,
    pub y: PathBuf,
    pub z: PathBuf,
    pub labels: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Raw,
    Cca,
    Frcca,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Raw => "raw",
            Method::Cca => "cca",
            Method::Frcca => "frcca",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Method::Raw),
            "cca" => Ok(Method::Cca),
            "frcca" => Ok(Method::Frcca),
            other => Err(CliError::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Logreg,
}

impl ClassifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Logreg => "logreg",
        }
    }
}

/// Random-search settings; when absent the pipeline uses fixed defaults
/// (RBF/"scale"/C=1 for the SVM; the configured lambda for logreg).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSettings {
    #[serde(default = "default_n_iter")]
    pub n_iter: usize,
    pub scorer: Scorer,
}

fn default_n_iter() -> usize {
    50
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Representation rank for the classification stage.
    #[serde(default = "default_rank")]
    pub rank: usize,
    /// Rank for the unsupervised delta stage; defaults to the planted rank
    /// for synthetic sources, otherwise to `rank`.
    #[serde(default)]
    pub unsupervised_rank: Option<usize>,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    #[serde(default = "default_split")]
    pub split_fraction: f64,
    #[serde(default)]
    pub tuning_seed: u64,
    #[serde(default = "default_eval_seeds")]
    pub eval_seeds: Vec<u64>,
    #[serde(default = "default_classifier")]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub search: Option<SearchSettings>,
    /// Fixed SVM parameters when no search is configured.
    #[serde(default)]
    pub svm_params: Option<SvmParams>,
    #[serde(default = "default_lambda")]
    pub logreg_lambda: f64,
    #[serde(default = "default_gsg_bins")]
    pub gsg_bins: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisConfig {
    pub source: DataSource,
    #[serde(default = "default_baseline")]
    pub baseline: Method,
    #[serde(default = "default_proposed")]
    pub proposed: Method,
    #[serde(default = "default_rank")]
    pub rank: usize,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    #[serde(default = "default_split")]
    pub split_fraction: f64,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: usize,
    #[serde(default = "default_seed_start")]
    pub seed_start: u64,
    #[serde(default = "default_classifier")]
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub search: Option<SearchSettings>,
    #[serde(default)]
    pub tuning_seed: u64,
    #[serde(default)]
    pub svm_params: Option<SvmParams>,
    #[serde(default = "default_lambda")]
    pub logreg_lambda: f64,
    #[serde(default = "default_gsg_bins")]
    pub gsg_bins: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub x: PathBuf,
    pub y: PathBuf,
    #[serde(default)]
    pub z: Option<PathBuf>,
    #[serde(default = "default_fit_method")]
    pub method: Method,
    #[serde(default = "default_rank")]
    pub rank: usize,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformConfig {
    pub model: PathBuf,
    pub data: PathBuf,
    /// "x" or "y".
    pub side: String,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Raw, Method::Cca, Method::Frcca]
}
fn default_rank() -> usize {
    2
}
fn default_ridge() -> f64 {
    1e-8
}
fn default_split() -> f64 {
    0.7
}
fn default_eval_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}
fn default_classifier() -> ClassifierKind {
    ClassifierKind::Svm
}
fn default_lambda() -> f64 {
    1.0
}
fn default_gsg_bins() -> usize {
    10
}
fn default_baseline() -> Method {
    Method::Cca
}
fn default_proposed() -> Method {
    Method::Frcca
}
fn default_n_seeds() -> usize {
    50
}
fn default_seed_start() -> u64 {
    1
}
fn default_alpha() -> f64 {
    0.05
}
fn default_fit_method() -> Method {
    Method::Cca
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(CliError::Config("split_fraction must lie in (0, 1)".into()));
        }
        if self.eval_seeds.is_empty() {
            return Err(CliError::Config("eval_seeds must be non-empty".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("methods must be non-empty".into()));
        }
        if self.rank == 0 {
            return Err(CliError::Config("rank must be positive".into()));
        }
        if let DataSource::Synth(s) = &self.source {
            s.validate().map_err(CliError::Core)?;
        }
        Ok(())
    }
}

impl HypothesisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(CliError::Config("split_fraction must lie in (0, 1)".into()));
        }
        if self.n_seeds < 3 {
            return Err(CliError::Config("n_seeds must be at least 3".into()));
        }
        if let DataSource::Synth(s) = &self.source {
            s.validate().map_err(CliError::Core)?;
        }
        Ok(())
    }
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}
