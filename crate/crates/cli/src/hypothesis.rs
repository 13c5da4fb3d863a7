//! Paired hypothesis suite: the same dataset is re-split across many seeds
//! for both methods, per-seed fairness gaps are aligned, and each
//! (metric, modality) cell runs the normality-gated one-sided test.

use std::collections::BTreeMap;

use serde::Serialize;

use faircca_core::classify::{random_search, SearchSpace, SvmParams};
use faircca_core::metrics::{GapMetric, ReportMeta};
use faircca_core::seeding;
use faircca_core::stats::{
    fairness_hypothesis_pipeline, Decision, HypothesisReport, PairedRuns, TestKind,
};

use crate::config::{ClassifierKind, HypothesisConfig, Method};
use crate::data::{load_source, Dataset};
use crate::error::{CliError, Result};
use crate::experiment::{
    evaluate_on_test, features_for, fit_method, stratified_split, train_classifier, ChosenParams,
    Modality,
};

/// Table-shaped cell: statistic, test type, p-value, decision.
#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub stat: f64,
    #[serde(rename = "type")]
    pub test_type: String,
    pub p: f64,
    pub decision: String,
}

#[derive(Debug, Serialize)]
pub struct HypothesisOutput {
    pub baseline: Method,
    pub proposed: Method,
    pub n_seeds: usize,
    pub alpha: f64,
    /// metric -> modality -> cell, mirroring the results-table layout.
    pub table: BTreeMap<String, BTreeMap<String, TableCell>>,
    pub reports: Vec<HypothesisReport>,
}

fn cell_from_report(report: &HypothesisReport) -> TableCell {
    TableCell {
        stat: report.statistic,
        test_type: match report.test_used {
            TestKind::PairedT => "paired_t".into(),
            TestKind::Wilcoxon => "wilcoxon".into(),
        },
        p: report.p_value,
        decision: match report.decision {
            Decision::RejectH0 => "reject_H0".into(),
            Decision::NotRejectH0 => "not_reject_H0".into(),
        },
    }
}

fn params_for(
    config: &HypothesisConfig,
    dataset: &Dataset,
    method: Method,
    modality: Modality,
) -> Result<ChosenParams> {
    match config.classifier {
        ClassifierKind::Logreg => Ok(ChosenParams::Logreg {
            lambda: config.logreg_lambda,
        }),
        ClassifierKind::Svm => match &config.search {
            None => Ok(ChosenParams::Svm(
                config.svm_params.unwrap_or_else(SvmParams::default_rbf),
            )),
            Some(settings) => {
                let (train_idx, _) =
                    stratified_split(&dataset.labels, config.split_fraction, config.tuning_seed)?;
                let outcome = fit_method(method, dataset, &train_idx, config.rank, config.ridge)?;
                let features = features_for(&outcome.fit, modality, dataset, &train_idx)?;
                let y_train: Vec<u8> = train_idx.iter().map(|&i| dataset.labels[i]).collect();
                let z_train: Vec<u8> = train_idx.iter().map(|&i| dataset.z[i]).collect();
                let mut space = SearchSpace::with_scorer(settings.scorer);
                space.n_iter = settings.n_iter;
                space.gsg_bins = config.gsg_bins;
                let seed = seeding::derive_indexed(
                    config.tuning_seed,
                    seeding::SEARCH,
                    match (method, modality) {
                        (Method::Raw, Modality::X) => 10,
                        (Method::Raw, Modality::Y) => 11,
                        (Method::Cca, Modality::X) => 12,
                        (Method::Cca, Modality::Y) => 13,
                        (Method::Frcca, Modality::X) => 14,
                        (Method::Frcca, Modality::Y) => 15,
                    },
                );
                let result = random_search(&features, &y_train, &z_train, &space, seed)?;
                Ok(ChosenParams::Svm(result.best.params))
            }
        },
    }
}

/// Runs the paired suite and the per-cell tests.
pub fn run_hypothesis_suite(config: &HypothesisConfig) -> Result<HypothesisOutput> {
    config.validate()?;
    let dataset = load_source(&config.source)?;

    // Per-seed gap values: [metric][modality][method-slot][seed].
    let methods = [config.baseline, config.proposed];
    let mut values: BTreeMap<(GapMetric, Modality, usize), Vec<f64>> = BTreeMap::new();

    let mut params: Vec<((Method, Modality), ChosenParams)> = Vec::new();
    for &method in &methods {
        for modality in Modality::BOTH {
            params.push((
                (method, modality),
                params_for(config, &dataset, method, modality)?,
            ));
        }
    }

    for k in 0..config.n_seeds {
        let seed = config.seed_start + k as u64;
        let (train_idx, test_idx) = stratified_split(&dataset.labels, config.split_fraction, seed)?;
        let y_train: Vec<u8> = train_idx.iter().map(|&i| dataset.labels[i]).collect();
        let y_test: Vec<u8> = test_idx.iter().map(|&i| dataset.labels[i]).collect();
        let z_test: Vec<u8> = test_idx.iter().map(|&i| dataset.z[i]).collect();
        for (slot, &method) in methods.iter().enumerate() {
            let outcome = fit_method(method, &dataset, &train_idx, config.rank, config.ridge)?;
            for modality in Modality::BOTH {
                let chosen = params
                    .iter()
                    .find(|((m, s), _)| *m == method && *s == modality)
                    .map(|(_, p)| *p)
                    .expect("params chosen for every cell");
                let train_features = features_for(&outcome.fit, modality, &dataset, &train_idx)?;
                let test_features = features_for(&outcome.fit, modality, &dataset, &test_idx)?;
                let model =
                    train_classifier(config.classifier, &chosen, &train_features, &y_train)?;
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
                for metric in GapMetric::ALL {
                    values
                        .entry((metric, modality, slot))
                        .or_default()
                        .push(report.gap(metric));
                }
            }
        }
    }

    let mut table: BTreeMap<String, BTreeMap<String, TableCell>> = BTreeMap::new();
    let mut reports = Vec::new();
    for metric in GapMetric::ALL {
        for modality in Modality::BOTH {
            let baseline = values
                .get(&(metric, modality, 0))
                .cloned()
                .unwrap_or_default();
            let proposed = values
                .get(&(metric, modality, 1))
                .cloned()
                .unwrap_or_default();
            let runs = PairedRuns::new(baseline, proposed, metric.name(), modality.name())
                .map_err(CliError::Core)?;
            let report =
                fairness_hypothesis_pipeline(&runs, config.alpha).map_err(CliError::Core)?;
            table
                .entry(metric.name().to_string())
                .or_default()
                .insert(modality.name().to_string(), cell_from_report(&report));
            reports.push(report);
        }
    }

    Ok(HypothesisOutput {
        baseline: config.baseline,
        proposed: config.proposed,
        n_seeds: config.n_seeds,
        alpha: config.alpha,
        table,
        reports,
    })
}
