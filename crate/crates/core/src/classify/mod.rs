//! Downstream classifiers and hyperparameter search.
//!
//! Labels use the {1, 2} encoding; class 2 is positive and maps to the
//! internal target +1. Prediction ties go to class 1.

mod logreg;
mod search;
mod svm;

pub use logreg::{logreg_loss, train_logreg, LogregModel};
pub use search::{
    random_search, stratified_kfold, CandidateResult, Scorer, SearchOutcome, SearchSpace, SvmParams,
};
pub use svm::{train_svm, train_svm_traced, SvmModel};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cca::DataMatrix;
use crate::error::{Error, Result};

/// Kernel family for the SVM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Rbf,
    Sigmoid,
    Linear,
}

/// Kernel coefficient: an explicit value or one of the data-driven rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", untagged)]
pub enum GammaSetting {
    Value(f64),
    Named(GammaRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRule {
    /// 1 / (D * Var(X_train)), variance over all entries.
    Scale,
    /// 1 / D.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: GammaSetting,
    /// Additive constant, sigmoid kernel only.
    pub coef0: f64,
}

impl KernelSpec {
    pub fn rbf(gamma: GammaSetting) -> Self {
        Self {
            kind: KernelKind::Rbf,
            gamma,
            coef0: 0.0,
        }
    }

    pub fn sigmoid(gamma: GammaSetting, coef0: f64) -> Self {
        Self {
            kind: KernelKind::Sigmoid,
            gamma,
            coef0,
        }
    }

    pub fn linear() -> Self {
        Self {
            kind: KernelKind::Linear,
            gamma: GammaSetting::Value(1.0),
            coef0: 0.0,
        }
    }

    /// Resolves the gamma rule against the training matrix.
    pub fn resolve_gamma(&self, x_train: &DMatrix<f64>) -> Result<f64> {
        let d = x_train.ncols() as f64;
        let g = match self.gamma {
            GammaSetting::Value(v) => v,
            GammaSetting::Named(GammaRule::Auto) => 1.0 / d,
            GammaSetting::Named(GammaRule::Scale) => {
                let n = (x_train.nrows() * x_train.ncols()) as f64;
                let mean = x_train.iter().sum::<f64>() / n;
                let var = x_train.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                if var <= 0.0 {
                    1.0 / d
                } else {
                    1.0 / (d * var)
                }
            }
        };
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter("gamma must resolve to > 0".into()));
        }
        Ok(g)
    }

    pub(crate) fn eval(&self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => dot(a, b),
            KernelKind::Rbf => {
                let mut d2 = 0.0;
                for (x, y) in a.iter().zip(b) {
                    d2 += (x - y) * (x - y);
                }
                (-gamma * d2).exp()
            }
            KernelKind::Sigmoid => (gamma * dot(a, b) + self.coef0).tanh(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Either trained model behind one prediction surface.
#[derive(Debug, Clone)]
pub enum TrainedClassifier {
    Svm(SvmModel),
    Logreg(LogregModel),
}

impl TrainedClassifier {
    pub fn n_features(&self) -> usize {
        match self {
            TrainedClassifier::Svm(m) => m.n_features(),
            TrainedClassifier::Logreg(m) => m.n_features(),
        }
    }

    /// Raw decision values: the SVM margin or the logit.
    pub fn decision_function(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        match self {
            TrainedClassifier::Svm(m) => m.decision_function(x),
            TrainedClassifier::Logreg(m) => m.decision_function(x),
        }
    }
}

/// Monotone scores in [0, 1]: the logistic map of the decision values.
/// For logistic regression this is the model probability; for the SVM it is
/// a rank-preserving squashing of the margin (no Platt refit).
pub fn predict_scores(model: &TrainedClassifier, x: &DataMatrix) -> Result<Vec<f64>> {
    Ok(model
        .decision_function(x)?
        .into_iter()
        .map(|s| 1.0 / (1.0 + (-s).exp()))
        .collect())
}

/// Hard labels in {1, 2}; exact ties go to class 1.
pub fn predict_labels(model: &TrainedClassifier, x: &DataMatrix) -> Result<Vec<u8>> {
    Ok(model
        .decision_function(x)?
        .into_iter()
        .map(|s| if s > 0.0 { 2 } else { 1 })
        .collect())
}

pub(crate) fn targets_pm1(y: &[u8]) -> Result<Vec<f64>> {
    if y.iter().any(|v| *v != 1 && *v != 2) {
        return Err(Error::InvalidParameter("labels must be 1 or 2".into()));
    }
    if !y.contains(&1) || !y.contains(&2) {
        return Err(Error::SingleClass);
    }
    Ok(y.iter().map(|v| if *v == 2 { 1.0 } else { -1.0 }).collect())
}
