//! End-to-end experiment orchestration: stratified splits, representation
//! fits, frozen-hyperparameter evaluation across seeds, unsupervised deltas
//! and the timing harness.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use faircca_core::classify::{
    predict_labels, predict_scores, random_search, train_logreg, train_svm, Scorer, SearchSpace,
    SvmParams, TrainedClassifier,
};
use faircca_core::metrics::{EvaluationFrame, FairnessReport, ReportMeta};
use faircca_core::{
    center_sensitive, fairness_gamma, fit_cca, fit_frcca, pct_change, seeding, standardize,
    CanonicalModel, DataMatrix, FairCanonicalModel, PctKind, SensitiveVector, Side, Standardizer,
};

use crate::config::{ClassifierKind, DataSource, ExperimentConfig, Method, SearchSettings};
use crate::data::{load_source, Dataset};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum Modality {
    X,
    Y,
}

impl Modality {
    pub const BOTH: [Modality; 2] = [Modality::X, Modality::Y];

    pub fn name(&self) -> &'static str {
        match self {
            Modality::X => "X",
            Modality::Y => "Y",
        }
    }
}

/// Label-stratified train/test split; per-class train counts are the rounded
/// fraction, clamped so both classes appear on both sides.
pub fn stratified_split(
    labels: &[u8],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CliError::Config("split fraction must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, seeding::SPLIT));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [1u8, 2u8] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(CliError::Data(format!(
                "class {class} has fewer than two samples; cannot split"
            )));
        }
        members.shuffle(&mut rng);
        let n_train =
            ((members.len() as f64 * fraction).round() as usize).clamp(1, members.len() - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// One fitted representation method, reusable for both modalities.
pub enum MethodFit {
    Raw { sx: Standardizer, sy: Standardizer },
    Cca(Box<CanonicalModel>),
    Frcca(Box<FairCanonicalModel>),
}

pub struct MethodFitOutcome {
    pub fit: MethodFit,
    pub fit_seconds: f64,
    /// Max constraint residual over both views on training data (frcca only).
    pub gamma_residual: Option<f64>,
}

pub fn fit_method(
    method: Method,
    dataset: &Dataset,
    train_idx: &[usize],
    rank: usize,
    ridge: f64,
) -> Result<MethodFitOutcome> {
    let x_train = dataset.x.select_rows(train_idx);
    let y_train = dataset.y.select_rows(train_idx);
    let start = Instant::now();
    match method {
        Method::Raw => {
            let (_, sx) = standardize(&x_train)?;
            let (_, sy) = standardize(&y_train)?;
            Ok(MethodFitOutcome {
                fit_seconds: start.elapsed().as_secs_f64(),
                fit: MethodFit::Raw { sx, sy },
                gamma_residual: None,
            })
        }
        Method::Cca => {
            let model = fit_cca(&x_train, &y_train, rank, ridge)?;
            Ok(MethodFitOutcome {
                fit_seconds: start.elapsed().as_secs_f64(),
                fit: MethodFit::Cca(Box::new(model)),
                gamma_residual: None,
            })
        }
        Method::Frcca => {
            let z_train = sensitive_for(dataset, train_idx)?;
            let model = fit_frcca(&x_train, &y_train, &z_train, rank, ridge)?;
            let fit_seconds = start.elapsed().as_secs_f64();
            let gamma = fairness_gamma(model.as_canonical(), &x_train, &y_train, &z_train)?;
            let residual = gamma.iter().fold(0.0_f64, |a, g| a.max(*g));
            Ok(MethodFitOutcome {
                fit: MethodFit::Frcca(Box::new(model)),
                fit_seconds,
                gamma_residual: Some(residual),
            })
        }
    }
}

fn sensitive_for(dataset: &Dataset, idx: &[usize]) -> faircca_core::Result<SensitiveVector> {
    let groups: Vec<u8> = idx.iter().map(|&i| dataset.z[i] - 1).collect();
    center_sensitive(&groups)
}

/// Features a fitted method produces for the given rows of one modality.
pub fn features_for(
    fit: &MethodFit,
    modality: Modality,
    dataset: &Dataset,
    idx: &[usize],
) -> Result<DataMatrix> {
    let raw = match modality {
        Modality::X => dataset.x.select_rows(idx),
        Modality::Y => dataset.y.select_rows(idx),
    };
    let out = match fit {
        MethodFit::Raw { sx, sy } => match modality {
            Modality::X => sx.apply(&raw)?,
            Modality::Y => sy.apply(&raw)?,
        },
        MethodFit::Cca(model) => {
            let side = match modality {
                Modality::X => Side::X,
                Modality::Y => Side::Y,
            };
            faircca_core::project(&raw, model, side)?
        }
        MethodFit::Frcca(model) => {
            let side = match modality {
                Modality::X => Side::X,
                Modality::Y => Side::Y,
            };
            model.project(&raw, side)?
        }
    };
    Ok(out)
}

/// Hyperparameters actually used for one record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChosenParams {
    Svm(SvmParams),
    Logreg { lambda: f64 },
}

pub fn train_classifier(
    kind: ClassifierKind,
    params: &ChosenParams,
    features: &DataMatrix,
    labels: &[u8],
) -> Result<TrainedClassifier> {
    Ok(match (kind, params) {
        (ClassifierKind::Svm, ChosenParams::Svm(p)) => {
            TrainedClassifier::Svm(train_svm(features, labels, p.c, p.kernel)?)
        }
        (ClassifierKind::Logreg, ChosenParams::Logreg { lambda }) => {
            TrainedClassifier::Logreg(train_logreg(features, labels, *lambda)?)
        }
        _ => {
            return Err(CliError::Config(
                "classifier kind does not match the chosen parameters".into(),
            ))
        }
    })
}

pub fn evaluate_on_test(
    model: &TrainedClassifier,
    test_features: &DataMatrix,
    y_test: &[u8],
    z_test: &[u8],
    gsg_bins: usize,
    meta: ReportMeta,
) -> Result<FairnessReport> {
    let predictions = predict_labels(model, test_features)?;
    let scores = predict_scores(model, test_features)?;
    let frame = EvaluationFrame::new(scores, predictions, y_test.to_vec(), z_test.to_vec())?;
    Ok(FairnessReport::compute(&frame, gsg_bins, meta)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: Method,
    pub modality: Modality,
    pub classifier: ClassifierKind,
    pub params: ChosenParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_residual: Option<f64>,
    pub report: FairnessReport,
    /// Wall-clock seconds of the representation fit. Excluded from
    /// runs.jsonl so experiment outputs stay byte-identical across reruns;
    /// timing.json carries it instead.
    #[serde(skip)]
    pub fit_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub seed: u64,
    pub method: Method,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryCell {
    pub method: Method,
    pub modality: Modality,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaRow {
    pub dim: usize,
    pub delta_corr_pct: f64,
    pub delta_fair_pct: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodTiming {
    pub method: Method,
    pub mean_s: f64,
    pub std_s: f64,
    pub n: usize,
    pub samples: Vec<f64>,
}

/// Best-hyperparameter record in the documented JSON shape.
#[derive(Debug, Clone, Serialize)]
pub struct BestParamsRecord {
    pub method: Method,
    pub modality: Modality,
    pub kind: String,
    #[serde(rename = "C")]
    pub c: f64,
    pub kernel: String,
    pub gamma: serde_json::Value,
    pub coef0: f64,
    pub scorer: String,
    pub cv_score: f64,
}

#[derive(Debug, Serialize)]
pub struct ExperimentOutput {
    pub runs: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
    pub summary: Vec<SummaryCell>,
    pub deltas: Vec<DeltaRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas_error: Option<String>,
    pub timing: Vec<MethodTiming>,
    pub best_params: Vec<BestParamsRecord>,
}

fn svm_params_to_record(
    method: Method,
    modality: Modality,
    scorer: Scorer,
    params: &SvmParams,
    cv_score: f64,
) -> BestParamsRecord {
    use faircca_core::classify::{GammaRule, GammaSetting, KernelKind};
    let kernel = match params.kernel.kind {
        KernelKind::Rbf => "rbf",
        KernelKind::Sigmoid => "sigmoid",
        KernelKind::Linear => "linear",
    };
    let gamma = match params.kernel.gamma {
        GammaSetting::Value(v) => serde_json::json!(v),
        GammaSetting::Named(GammaRule::Scale) => serde_json::json!("scale"),
        GammaSetting::Named(GammaRule::Auto) => serde_json::json!("auto"),
    };
    BestParamsRecord {
        method,
        modality,
        kind: "svm".into(),
        c: params.c,
        kernel: kernel.into(),
        gamma,
        coef0: params.kernel.coef0,
        scorer: scorer.name().into(),
        cv_score,
    }
}

/// Tunes SVM hyperparameters on the tuning split, or falls back to the fixed
/// configuration.
#[allow(clippy::type_complexity)]
fn choose_params(
    config: &ExperimentConfig,
    dataset: &Dataset,
    methods: &[Method],
) -> Result<(
    Vec<((Method, Modality), ChosenParams)>,
    Vec<BestParamsRecord>,
)> {
    let mut chosen = Vec::new();
    let mut best_records = Vec::new();
    match (config.classifier, &config.search) {
        (ClassifierKind::Logreg, _) => {
            for &m in methods {
                for modality in Modality::BOTH {
                    chosen.push((
                        (m, modality),
                        ChosenParams::Logreg {
                            lambda: config.logreg_lambda,
                        },
                    ));
                }
            }
        }
        (ClassifierKind::Svm, None) => {
            let params = config.svm_params.unwrap_or_else(SvmParams::default_rbf);
            for &m in methods {
                for modality in Modality::BOTH {
                    chosen.push(((m, modality), ChosenParams::Svm(params)));
                }
            }
        }
        (ClassifierKind::Svm, Some(SearchSettings { n_iter, scorer })) => {
            let (train_idx, _) =
                stratified_split(&dataset.labels, config.split_fraction, config.tuning_seed)?;
            let y_train: Vec<u8> = train_idx.iter().map(|&i| dataset.labels[i]).collect();
            let z_train: Vec<u8> = train_idx.iter().map(|&i| dataset.z[i]).collect();
            for &m in methods {
                let outcome = fit_method(m, dataset, &train_idx, config.rank, config.ridge)?;
                for modality in Modality::BOTH {
                    let features = features_for(&outcome.fit, modality, dataset, &train_idx)?;
                    let mut space = SearchSpace::with_scorer(*scorer);
                    space.n_iter = *n_iter;
                    space.gsg_bins = config.gsg_bins;
                    let search_seed = seeding::derive_indexed(
                        config.tuning_seed,
                        seeding::SEARCH,
                        cell_tag(m, modality),
                    );
                    let result = random_search(&features, &y_train, &z_train, &space, search_seed)?;
                    best_records.push(svm_params_to_record(
                        m,
                        modality,
                        *scorer,
                        &result.best.params,
                        result.best.cv_score,
                    ));
                    chosen.push(((m, modality), ChosenParams::Svm(result.best.params)));
                }
            }
        }
    }
    Ok((chosen, best_records))
}

fn cell_tag(method: Method, modality: Modality) -> u64 {
    let m = match method {
        Method::Raw => 0u64,
        Method::Cca => 1,
        Method::Frcca => 2,
    };
    let side = match modality {
        Modality::X => 0u64,
        Modality::Y => 1,
    };
    m * 2 + side
}

fn lookup(
    table: &[((Method, Modality), ChosenParams)],
    method: Method,
    modality: Modality,
) -> ChosenParams {
    table
        .iter()
        .find(|((m, s), _)| *m == method && *s == modality)
        .map(|(_, p)| *p)
        .expect("parameters chosen for every cell")
}

/// Unsupervised stage on the full dataset: per-dimension percentage changes
/// of correlation and fairness of FR-CCA against the CCA baseline.
pub fn unsupervised_deltas(dataset: &Dataset, rank: usize, ridge: f64) -> Result<Vec<DeltaRow>> {
    let groups: Vec<u8> = dataset.z.iter().map(|g| g - 1).collect();
    let z = center_sensitive(&groups)?;
    let plain = fit_cca(&dataset.x, &dataset.y, rank, ridge)?;
    let fair = fit_frcca(&dataset.x, &dataset.y, &z, rank, ridge)?;
    let gamma_plain = fairness_gamma(&plain, &dataset.x, &dataset.y, &z)?;
    let gamma_fair = fairness_gamma(fair.as_canonical(), &dataset.x, &dataset.y, &z)?;
    let d_corr = pct_change(fair.rho(), plain.rho(), PctKind::Corr)?;
    let d_fair = pct_change(&gamma_fair, &gamma_plain, PctKind::Fair)?;
    Ok(d_corr
        .iter()
        .zip(&d_fair)
        .enumerate()
        .map(|(i, (c, f))| DeltaRow {
            dim: i + 1,
            delta_corr_pct: *c,
            delta_fair_pct: *f,
        })
        .collect())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dataset = load_source(&config.source)?;
    let methods = config.methods.clone();
    let (params_table, best_params) = choose_params(config, &dataset, &methods)?;

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for &seed in &config.eval_seeds {
        let (train_idx, test_idx) = stratified_split(&dataset.labels, config.split_fraction, seed)?;
        let y_train: Vec<u8> = train_idx.iter().map(|&i| dataset.labels[i]).collect();
        let y_test: Vec<u8> = test_idx.iter().map(|&i| dataset.labels[i]).collect();
        let z_test: Vec<u8> = test_idx.iter().map(|&i| dataset.z[i]).collect();
        for &method in &methods {
            let outcome = match fit_method(method, &dataset, &train_idx, config.rank, config.ridge)
            {
                Ok(o) => o,
                Err(e) => {
                    failures.push(CellFailure {
                        seed,
                        method,
                        error: e.to_string(),
                    });
                    continue;
                }
            };
            for modality in Modality::BOTH {
                let params = lookup(&params_table, method, modality);
                let cell = (|| -> Result<RunRecord> {
                    let train_features =
                        features_for(&outcome.fit, modality, &dataset, &train_idx)?;
                    let test_features = features_for(&outcome.fit, modality, &dataset, &test_idx)?;
                    let model =
                        train_classifier(config.classifier, &params, &train_features, &y_train)?;
                    let report = evaluate_on_test(
                        &model,
                        &test_features,
                        &y_test,
                        &z_test,
                        config.gsg_bins,
                        ReportMeta {
                            seed,
                            method: method.name().into(),
                            modality: modality.name().into(),
                        },
                    )?;
                    Ok(RunRecord {
                        seed,
                        method,
                        modality,
                        classifier: config.classifier,
                        params,
                        gamma_residual: outcome.gamma_residual,
                        report,
                        fit_seconds: outcome.fit_seconds,
                    })
                })();
                match cell {
                    Ok(record) => runs.push(record),
                    Err(e) => failures.push(CellFailure {
                        seed,
                        method,
                        error: format!("{} modality: {e}", modality.name()),
                    }),
                }
            }
        }
    }

    let summary = summarize(&runs);
    let timing = timing_summary(&runs);
    let unsup_rank = config.unsupervised_rank.unwrap_or(match &config.source {
        DataSource::Synth(s) => s.rank(),
        DataSource::Csv(_) => config.rank,
    });
    let (deltas, deltas_error) = match unsupervised_deltas(&dataset, unsup_rank, config.ridge) {
        Ok(rows) => (rows, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    Ok(ExperimentOutput {
        runs,
        failures,
        summary,
        deltas,
        deltas_error,
        timing,
        best_params,
    })
}

const SUMMARY_METRICS: [&str; 7] = [
    "gsg",
    "dpg",
    "eog",
    "accuracy",
    "precision",
    "recall",
    "roc_auc",
];

fn metric_value(report: &FairnessReport, metric: &str) -> f64 {
    match metric {
        "gsg" => report.gsg,
        "dpg" => report.dpg,
        "eog" => report.eog,
        "accuracy" => report.accuracy,
        "precision" => report.precision,
        "recall" => report.recall,
        "roc_auc" => report.roc_auc,
        _ => unreachable!("unknown metric {metric}"),
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

fn summarize(runs: &[RunRecord]) -> Vec<SummaryCell> {
    let mut cells = Vec::new();
    let mut seen: Vec<(Method, Modality)> = Vec::new();
    for run in runs {
        if !seen.contains(&(run.method, run.modality)) {
            seen.push((run.method, run.modality));
        }
    }
    for (method, modality) in seen {
        let group: Vec<&RunRecord> = runs
            .iter()
            .filter(|r| r.method == method && r.modality == modality)
            .collect();
        for metric in SUMMARY_METRICS {
            let values: Vec<f64> = group
                .iter()
                .map(|r| metric_value(&r.report, metric))
                .collect();
            let (mean, std) = mean_std(&values);
            cells.push(SummaryCell {
                method,
                modality,
                metric: metric.into(),
                mean,
                std,
                n: values.len(),
            });
        }
    }
    cells
}

fn timing_summary(runs: &[RunRecord]) -> Vec<MethodTiming> {
    let mut methods: Vec<Method> = Vec::new();
    for run in runs {
        if !methods.contains(&run.method) {
            methods.push(run.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            // One fit per (seed, method); modality X carries the timing.
            let samples: Vec<f64> = runs
                .iter()
                .filter(|r| r.method == method && r.modality == Modality::X)
                .map(|r| r.fit_seconds)
                .collect();
            let (mean_s, std_s) = mean_std(&samples);
            MethodTiming {
                method,
                mean_s,
                std_s,
                n: samples.len(),
                samples,
            }
        })
        .collect()
}
