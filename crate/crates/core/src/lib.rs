//! Fair representation CCA.
//!
//! Canonical correlation analysis with a sensitive-attribute nullspace
//! constraint, plus the machinery needed to evaluate it end to end: a
//! planted-correlation synthetic data generator, downstream classifiers with
//! stratified cross-validated random search, group-fairness metrics, and the
//! paired hypothesis-test pipeline that certifies fairness improvements.

pub mod cca;
pub mod classify;
pub mod error;
pub mod fair;
pub mod linalg;
pub mod metrics;
pub mod seeding;
pub mod stats;
pub mod synth;

pub use cca::{
    canonical_correlations, fit_cca, project, standardize, CanonicalModel, DataMatrix, Side,
    Standardizer,
};
pub use error::{Error, Result};
pub use fair::{
    center_sensitive, fairness_gamma, fairness_gamma_with, fit_frcca, fit_frcca_with,
    nullspace_basis, pct_change, FairCanonicalModel, GammaMode, NullspaceBasis, PctKind,
    SensitiveVector, ZScaling,
};
pub use synth::{
    build_joint_covariance, gen_labels, gen_sensitive, generate_dataset, haar_orthonormal,
    sample_views, SynthConfig, SynthDataset,
};
