//! Stratified k-fold cross-validation and uniform random hyperparameter
//! search for the SVM, scored by a fairness gap or accuracy.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cca::DataMatrix;
use crate::error::{Error, Result};
use crate::metrics::{dpg, eog, gsg, EvaluationFrame};

use super::{
    predict_labels, predict_scores, train_svm, GammaRule, GammaSetting, KernelKind, KernelSpec,
    TrainedClassifier,
};

/// Deterministic stratified folds: within each class the indices are
/// shuffled once, then dealt round-robin, so per-fold class counts differ by
/// at most one from exact proportionality.
pub fn stratified_kfold(y: &[u8], k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if y.iter().any(|v| *v != 1 && *v != 2) {
        return Err(Error::InvalidParameter("labels must be 1 or 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; y.len()];
    for class in [1u8, 2u8] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                k,
            });
        }
        use rand::seq::SliceRandom;
        members.shuffle(&mut rng);
        for (pos, &i) in members.iter().enumerate() {
            fold_of[i] = pos % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let test: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] == f).collect();
            let train: Vec<usize> = (0..y.len()).filter(|&i| fold_of[i] != f).collect();
            (train, test)
        })
        .collect())
}

/// Selection statistic for the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scorer {
    Dpg,
    Eog,
    Gsg,
    Accuracy,
}

impl Scorer {
    /// Fairness gaps are minimized, accuracy maximized.
    pub fn lower_is_better(&self) -> bool {
        !matches!(self, Scorer::Accuracy)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scorer::Dpg => "dpg",
            Scorer::Eog => "eog",
            Scorer::Gsg => "gsg",
            Scorer::Accuracy => "accuracy",
        }
    }
}

/// Search ranges: penalty `C` and kernel coefficient over [0.1, 200] (the
/// latter drawing "scale"/"auto" with probability 0.2), `coef0` over [0, 50]
/// for the sigmoid kernel, kernel kind uniform over {rbf, sigmoid}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpace {
    #[serde(default = "default_c_range")]
    pub c_range: (f64, f64),
    #[serde(default = "default_gamma_range")]
    pub gamma_range: (f64, f64),
    #[serde(default = "default_coef0_range")]
    pub coef0_range: (f64, f64),
    #[serde(default = "default_n_iter")]
    pub n_iter: usize,
    #[serde(default = "default_k_folds")]
    pub k_folds: usize,
    pub scorer: Scorer,
    #[serde(default = "default_gsg_bins")]
    pub gsg_bins: usize,
}

fn default_c_range() -> (f64, f64) {
    (0.1, 200.0)
}
fn default_gamma_range() -> (f64, f64) {
    (0.1, 200.0)
}
fn default_coef0_range() -> (f64, f64) {
    (0.0, 50.0)
}
fn default_n_iter() -> usize {
    50
}
fn default_k_folds() -> usize {
    5
}
fn default_gsg_bins() -> usize {
    10
}

impl SearchSpace {
    pub fn with_scorer(scorer: Scorer) -> Self {
        Self {
            c_range: default_c_range(),
            gamma_range: default_gamma_range(),
            coef0_range: default_coef0_range(),
            n_iter: default_n_iter(),
            k_folds: default_k_folds(),
            scorer,
            gsg_bins: default_gsg_bins(),
        }
    }
}

/// One sampled SVM configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: KernelSpec,
}

impl SvmParams {
    /// Sensible fixed configuration when no search is run.
    pub fn default_rbf() -> Self {
        Self {
            c: 1.0,
            kernel: KernelSpec::rbf(GammaSetting::Named(GammaRule::Scale)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateResult {
    pub draw_index: usize,
    pub params: SvmParams,
    /// Mean scorer over evaluable folds; infinity when no fold was evaluable.
    pub cv_score: f64,
    pub folds_used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub scorer: Scorer,
    pub best: CandidateResult,
    pub table: Vec<CandidateResult>,
}

fn sample_params(space: &SearchSpace, rng: &mut ChaCha8Rng) -> SvmParams {
    let kind = if rng.random_range(0..2u8) == 0 {
        KernelKind::Rbf
    } else {
        KernelKind::Sigmoid
    };
    let c = rng.random_range(space.c_range.0..=space.c_range.1);
    let gamma = if rng.random::<f64>() < 0.8 {
        GammaSetting::Value(rng.random_range(space.gamma_range.0..=space.gamma_range.1))
    } else if rng.random_range(0..2u8) == 0 {
        GammaSetting::Named(GammaRule::Scale)
    } else {
        GammaSetting::Named(GammaRule::Auto)
    };
    let coef0 = if kind == KernelKind::Sigmoid {
        rng.random_range(space.coef0_range.0..=space.coef0_range.1)
    } else {
        0.0
    };
    SvmParams {
        c,
        kernel: KernelSpec { kind, gamma, coef0 },
    }
}

/// Evaluates a fairness scorer on one validation fold; `None` when the fold
/// cannot support it (a missing group).
fn fold_gap_score(
    scorer: Scorer,
    gsg_bins: usize,
    model: &TrainedClassifier,
    x_val: &DataMatrix,
    y_val: &[u8],
    z_val: &[u8],
) -> Result<Option<f64>> {
    let preds = predict_labels(model, x_val)?;
    let scores = predict_scores(model, x_val)?;
    let frame = EvaluationFrame::new(scores, preds, y_val.to_vec(), z_val.to_vec())?;
    let outcome = match scorer {
        Scorer::Dpg => dpg(&frame),
        Scorer::Eog => eog(&frame),
        Scorer::Gsg => gsg(&frame, gsg_bins),
        Scorer::Accuracy => unreachable!("accuracy handled by the caller"),
    };
    match outcome {
        Ok(v) => Ok(Some(v)),
        Err(Error::MissingGroup) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Uniform random search with stratified k-fold CV. The folds are drawn once
/// (before any candidate) so every configuration sees the same splits; ties
/// on the CV score keep the earlier draw.
pub fn random_search(
    x: &DataMatrix,
    y: &[u8],
    z: &[u8],
    space: &SearchSpace,
    seed: u64,
) -> Result<SearchOutcome> {
    if space.n_iter == 0 {
        return Err(Error::InvalidParameter("n_iter must be at least 1".into()));
    }
    if x.n_samples() != y.len() || y.len() != z.len() {
        return Err(Error::ShapeMismatch(
            "features, labels and groups must align".into(),
        ));
    }
    let folds = stratified_kfold(
        y,
        space.k_folds,
        crate::seeding::derive(seed, crate::seeding::FOLDS),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(crate::seeding::derive(seed, crate::seeding::SEARCH));
    let mut table = Vec::with_capacity(space.n_iter);
    for draw_index in 0..space.n_iter {
        let params = sample_params(space, &mut rng);
        let mut scores = Vec::new();
        for (train_idx, val_idx) in &folds {
            let x_train = x.select_rows(train_idx);
            let y_train: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
            let model =
                TrainedClassifier::Svm(train_svm(&x_train, &y_train, params.c, params.kernel)?);
            let x_val = x.select_rows(val_idx);
            let y_val: Vec<u8> = val_idx.iter().map(|&i| y[i]).collect();
            let z_val: Vec<u8> = val_idx.iter().map(|&i| z[i]).collect();
            let value = match space.scorer {
                Scorer::Accuracy => {
                    let preds = predict_labels(&model, &x_val)?;
                    let correct = preds.iter().zip(&y_val).filter(|(p, t)| p == t).count();
                    Some(correct as f64 / y_val.len() as f64)
                }
                _ => fold_gap_score(space.scorer, space.gsg_bins, &model, &x_val, &y_val, &z_val)?,
            };
            if let Some(v) = value {
                scores.push(v);
            }
        }
        let cv_score = if scores.is_empty() {
            if space.scorer.lower_is_better() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            scores.iter().sum::<f64>() / scores.len() as f64
        };
        table.push(CandidateResult {
            draw_index,
            params,
            cv_score,
            folds_used: scores.len(),
        });
    }
    let best = table
        .iter()
        .cloned()
        .reduce(|best, cand| {
            let better = if space.scorer.lower_is_better() {
                cand.cv_score < best.cv_score
            } else {
                cand.cv_score > best.cv_score
            };
            if better {
                cand
            } else {
                best
            }
        })
        .expect("n_iter >= 1");
    Ok(SearchOutcome {
        scorer: space.scorer,
        best,
        table,
    })
}
