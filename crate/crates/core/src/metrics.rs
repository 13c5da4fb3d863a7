//! Empirical group-fairness gaps and standard classification metrics.
//!
//! Demographic parity and equalized-odds gaps consume hard predictions (they
//! measure delivered decisions); the group sufficiency gap consumes monotone
//! scores in [0, 1] through quantile binning (it measures calibration).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Everything needed to evaluate one prediction set. Classes and groups use
/// the {1, 2} encoding of the rest of the pipeline; class 2 is positive.
#[derive(Debug, Clone)]
pub struct EvaluationFrame {
    scores: Vec<f64>,
    predictions: Vec<u8>,
    labels: Vec<u8>,
    groups: Vec<u8>,
}

impl EvaluationFrame {
    pub fn new(
        scores: Vec<f64>,
        predictions: Vec<u8>,
        labels: Vec<u8>,
        groups: Vec<u8>,
    ) -> Result<Self> {
        let n = scores.len();
        if n == 0 || predictions.len() != n || labels.len() != n || groups.len() != n {
            return Err(Error::ShapeMismatch(
                "evaluation frame vectors must be equal-length and non-empty".into(),
            ));
        }
        if scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidParameter("scores must lie in [0, 1]".into()));
        }
        for v in [&predictions, &labels, &groups] {
            if v.iter().any(|e| *e != 1 && *e != 2) {
                return Err(Error::InvalidParameter(
                    "predictions, labels and groups must be 1 or 2".into(),
                ));
            }
        }
        Ok(Self {
            scores,
            predictions,
            labels,
            groups,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn predictions(&self) -> &[u8] {
        &self.predictions
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn groups(&self) -> &[u8] {
        &self.groups
    }

    fn pred01(&self, i: usize) -> f64 {
        (self.predictions[i] == 2) as u8 as f64
    }

    fn label01(&self, i: usize) -> f64 {
        (self.labels[i] == 2) as u8 as f64
    }
}

fn mean_over(idx: &[usize], f: impl Fn(usize) -> f64) -> f64 {
    idx.iter().map(|&i| f(i)).sum::<f64>() / idx.len() as f64
}

/// Demographic parity gap: absolute difference of the positive-prediction
/// rates between the two groups.
pub fn dpg(frame: &EvaluationFrame) -> Result<f64> {
    let g1: Vec<usize> = (0..frame.len()).filter(|&i| frame.groups[i] == 1).collect();
    let g2: Vec<usize> = (0..frame.len()).filter(|&i| frame.groups[i] == 2).collect();
    if g1.is_empty() || g2.is_empty() {
        return Err(Error::MissingGroup);
    }
    let m1 = mean_over(&g1, |i| frame.pred01(i));
    let m2 = mean_over(&g2, |i| frame.pred01(i));
    Ok((m1 - m2).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct EogOutcome {
    pub value: f64,
    /// Label strata where one group was empty and the stratum was skipped.
    pub skipped_strata: usize,
}

/// Equalized odds gap: mean over observed label strata of the absolute
/// between-group difference of positive-prediction rates. Strata missing a
/// group are skipped and the mean renormalized over the rest.
pub fn eog_detailed(frame: &EvaluationFrame) -> Result<EogOutcome> {
    if !frame.groups.contains(&1) || !frame.groups.contains(&2) {
        return Err(Error::MissingGroup);
    }
    let mut terms = Vec::new();
    let mut skipped = 0;
    for label in [1u8, 2u8] {
        let in_stratum: Vec<usize> = (0..frame.len())
            .filter(|&i| frame.labels[i] == label)
            .collect();
        if in_stratum.is_empty() {
            continue;
        }
        let g1: Vec<usize> = in_stratum
            .iter()
            .copied()
            .filter(|&i| frame.groups[i] == 1)
            .collect();
        let g2: Vec<usize> = in_stratum
            .iter()
            .copied()
            .filter(|&i| frame.groups[i] == 2)
            .collect();
        if g1.is_empty() || g2.is_empty() {
            skipped += 1;
            continue;
        }
        let m1 = mean_over(&g1, |i| frame.pred01(i));
        let m2 = mean_over(&g2, |i| frame.pred01(i));
        terms.push((m1 - m2).abs());
    }
    let value = if terms.is_empty() {
        0.0
    } else {
        terms.iter().sum::<f64>() / terms.len() as f64
    };
    Ok(EogOutcome {
        value,
        skipped_strata: skipped,
    })
}

pub fn eog(frame: &EvaluationFrame) -> Result<f64> {
    Ok(eog_detailed(frame)?.value)
}

#[derive(Debug, Clone, Copy)]
pub struct GsgOutcome {
    pub value: f64,
    /// All scores identical: the estimate collapses to a single bin.
    pub degenerate_scores: bool,
}

/// Group sufficiency gap via quantile binning of the scores: within each bin,
/// the group-weighted absolute deviation of per-group label means from the
/// bin label mean, averaged over bins by occupancy.
pub fn gsg_detailed(frame: &EvaluationFrame, n_bins: usize) -> Result<GsgOutcome> {
    if n_bins < 2 {
        return Err(Error::InvalidParameter("n_bins must be at least 2".into()));
    }
    if !frame.groups.contains(&1) || !frame.groups.contains(&2) {
        return Err(Error::MissingGroup);
    }
    let n = frame.len();
    let mut sorted = frame.scores.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let degenerate = sorted[0] == sorted[n - 1];
    // Quantile edges at ranks ceil(n j / bins); equal scores always share a bin.
    let edges: Vec<f64> = (1..n_bins)
        .map(|j| sorted[(n * j).div_ceil(n_bins) - 1])
        .collect();
    let bin_of = |s: f64| edges.iter().filter(|e| s > **e).count();

    let mut total = 0.0;
    for b in 0..n_bins {
        let members: Vec<usize> = (0..n).filter(|&i| bin_of(frame.scores[i]) == b).collect();
        if members.is_empty() {
            continue;
        }
        let bin_weight = members.len() as f64 / n as f64;
        let m = mean_over(&members, |i| frame.label01(i));
        let mut inner = 0.0;
        for group in [1u8, 2u8] {
            let ga: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&i| frame.groups[i] == group)
                .collect();
            if ga.is_empty() {
                continue;
            }
            let ma = mean_over(&ga, |i| frame.label01(i));
            inner += ga.len() as f64 / members.len() as f64 * (m - ma).abs();
        }
        total += bin_weight * inner;
    }
    Ok(GsgOutcome {
        value: total,
        degenerate_scores: degenerate,
    })
}

pub fn gsg(frame: &EvaluationFrame, n_bins: usize) -> Result<f64> {
    Ok(gsg_detailed(frame, n_bins)?.value)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub roc_auc: f64,
    /// Precision reported as 0 because there were no positive predictions.
    pub undefined_precision: bool,
}

/// Accuracy, precision/recall for the positive class (2) and ROC-AUC via the
/// rank statistic with ties counted half.
pub fn classification_metrics(frame: &EvaluationFrame) -> Result<ClassificationMetrics> {
    let n = frame.len();
    let n_pos = frame.labels.iter().filter(|l| **l == 2).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    let mut correct = 0usize;
    for i in 0..n {
        let pred_pos = frame.predictions[i] == 2;
        let label_pos = frame.labels[i] == 2;
        if frame.predictions[i] == frame.labels[i] {
            correct += 1;
        }
        match (pred_pos, label_pos) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let undefined_precision = tp + fp == 0;
    let precision = if undefined_precision {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = tp as f64 / (tp + fn_) as f64;

    // Rank statistic: average ranks handle score ties as half-wins.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| frame.scores[a].partial_cmp(&frame.scores[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && frame.scores[order[j + 1]] == frame.scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    let rank_sum_pos: f64 = (0..n)
        .filter(|&i| frame.labels[i] == 2)
        .map(|i| ranks[i])
        .sum();
    let roc_auc =
        (rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0) / (n_pos as f64 * n_neg as f64);

    Ok(ClassificationMetrics {
        accuracy: correct as f64 / n as f64,
        precision,
        recall,
        roc_auc,
        undefined_precision,
    })
}

/// Provenance attached to a fairness report.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ReportMeta {
    pub seed: u64,
    pub method: String,
    pub modality: String,
}

/// One full evaluation: the three gaps, the classification metrics, and the
/// estimator flags. Field order is the serialization order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FairnessReport {
    pub dpg: f64,
    pub eog: f64,
    pub gsg: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub roc_auc: f64,
    pub eog_skipped_strata: usize,
    pub degenerate_scores: bool,
    pub undefined_precision: bool,
    pub meta: ReportMeta,
}

impl FairnessReport {
    pub fn compute(frame: &EvaluationFrame, gsg_bins: usize, meta: ReportMeta) -> Result<Self> {
        let dpg_v = dpg(frame)?;
        let eog_o = eog_detailed(frame)?;
        let gsg_o = gsg_detailed(frame, gsg_bins)?;
        let cls = classification_metrics(frame)?;
        Ok(Self {
            dpg: dpg_v,
            eog: eog_o.value,
            gsg: gsg_o.value,
            accuracy: cls.accuracy,
            precision: cls.precision,
            recall: cls.recall,
            roc_auc: cls.roc_auc,
            eog_skipped_strata: eog_o.skipped_strata,
            degenerate_scores: gsg_o.degenerate_scores,
            undefined_precision: cls.undefined_precision,
            meta,
        })
    }

    pub fn gap(&self, metric: GapMetric) -> f64 {
        match metric {
            GapMetric::Dpg => self.dpg,
            GapMetric::Eog => self.eog,
            GapMetric::Gsg => self.gsg,
        }
    }
}

/// The three fairness gaps a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMetric {
    Dpg,
    Eog,
    Gsg,
}

impl GapMetric {
    pub const ALL: [GapMetric; 3] = [GapMetric::Gsg, GapMetric::Dpg, GapMetric::Eog];

    pub fn name(&self) -> &'static str {
        match self {
            GapMetric::Dpg => "dpg",
            GapMetric::Eog => "eog",
            GapMetric::Gsg => "gsg",
        }
    }
}
