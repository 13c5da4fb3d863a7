//! Paired statistical validation: Shapiro-Wilk normality gate, then a
//! one-sided paired t-test or Wilcoxon signed-rank test of "proposed less
//! than baseline".

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

fn poly(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Shapiro-Wilk W and upper-tail p-value (Royston's AS R94 approximation,
/// valid for 3 <= n <= 5000).
pub fn shapiro_wilk(x: &[f64]) -> Result<(f64, f64)> {
    let n = x.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::SampleTooSmall {
            n,
            min: 3,
            max: 5000,
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "sample contains non-finite values".into(),
        ));
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::ConstantSample);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let normal = std_normal();
    let nf = n as f64;
    let weights: Vec<f64> = if n == 3 {
        vec![
            -std::f64::consts::FRAC_1_SQRT_2,
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
        ]
    } else {
        let m: Vec<f64> = (1..=n)
            .map(|i| normal.inverse_cdf((i as f64 - 0.375) / (nf + 0.25)))
            .collect();
        let ssm: f64 = m.iter().map(|v| v * v).sum();
        let rsn = 1.0 / nf.sqrt();
        let a_n = m[n - 1] / ssm.sqrt()
            + poly(
                &[0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056],
                rsn,
            );
        let mut w = vec![0.0; n];
        if n > 5 {
            let a_n1 = m[n - 2] / ssm.sqrt()
                + poly(
                    &[0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633],
                    rsn,
                );
            let phi = (ssm - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2])
                / (1.0 - 2.0 * a_n * a_n - 2.0 * a_n1 * a_n1);
            for i in 2..n - 2 {
                w[i] = m[i] / phi.sqrt();
            }
            w[n - 1] = a_n;
            w[0] = -a_n;
            w[n - 2] = a_n1;
            w[1] = -a_n1;
        } else {
            let phi = (ssm - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * a_n * a_n);
            for i in 1..n - 1 {
                w[i] = m[i] / phi.sqrt();
            }
            w[n - 1] = a_n;
            w[0] = -a_n;
        }
        w
    };

    let mean = sorted.iter().sum::<f64>() / nf;
    let ssq: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
    let num: f64 = weights.iter().zip(&sorted).map(|(a, v)| a * v).sum();
    let mut w_stat = num * num / ssq;
    if w_stat >= 1.0 {
        return Ok((1.0, 1.0));
    }
    if w_stat < 0.0 {
        w_stat = 0.0;
    }

    let p = if n == 3 {
        let v = (6.0 / std::f64::consts::PI) * ((w_stat.sqrt()).asin() - (0.75_f64).sqrt().asin());
        v.clamp(0.0, 1.0)
    } else if n <= 11 {
        let gamma = poly(&[-2.273, 0.459], nf);
        let arg = gamma - (1.0 - w_stat).ln();
        if arg <= 0.0 {
            0.0
        } else {
            let wprime = -arg.ln();
            let mu = poly(&[0.5440, -0.39978, 0.025054, -6.714e-4], nf);
            let sigma = poly(&[1.3822, -0.77857, 0.062767, -2.0322e-3], nf).exp();
            1.0 - std_normal().cdf((wprime - mu) / sigma)
        }
    } else {
        let u = nf.ln();
        let wprime = (1.0 - w_stat).ln();
        let mu = poly(&[-1.5861, -0.31082, -0.083751, 3.8915e-3], u);
        let sigma = poly(&[-0.4803, -0.082676, 3.0302e-3], u).exp();
        1.0 - std_normal().cdf((wprime - mu) / sigma)
    };
    Ok((w_stat, p))
}

/// One-sided paired t-test of H1: mean(a - b) < 0.
/// Returns (T, p) with `p = P(T_{n-1} <= T)`.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "paired_t: lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::SampleTooSmall {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n as f64 - 1.0).expect("valid dof");
    Ok((t, dist.cdf(t)))
}

/// One-sided Wilcoxon signed-rank test of H1: a < b (small positive-rank sum
/// of d = a - b favors rejection).
///
/// Zero differences are dropped (classic method); ties get average ranks.
/// The p-value is exact for up to 25 nonzero differences via the count
/// distribution over sign assignments, and a tie-corrected normal
/// approximation with continuity correction above that.
pub fn wilcoxon_signed(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "wilcoxon_signed: lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| *v != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return Err(Error::AllZeroDifferences);
    }
    let ranks = average_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| *r)
        .sum::<f64>()
        .max(0.0); // empty sums yield -0.0

    let p = if n <= 25 {
        exact_p_leq(&ranks, w_plus)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
        var -= tie_correction(&ranks) / 48.0;
        let z = (w_plus - mean + 0.5) / var.sqrt();
        std_normal().cdf(z)
    };
    Ok((w_plus, p))
}

/// Average 1-based ranks with ties sharing the mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[idx[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Sum of t^3 - t over tie groups of the ranks.
fn tie_correction(ranks: &[f64]) -> f64 {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}

/// P(W <= w_obs) over all 2^n equally likely sign assignments of the observed
/// ranks, via the count distribution on doubled (hence integer) ranks.
fn exact_p_leq(ranks: &[f64], w_obs: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for r in &doubled {
        for s in (*r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let w2 = (2.0 * w_obs).round() as usize;
    let favorable: u64 = counts.iter().take(w2.min(total) + 1).sum();
    favorable as f64 / (1u64 << ranks.len()) as f64
}

/// Aligned per-seed metric values for two methods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairedRuns {
    pub baseline: Vec<f64>,
    pub proposed: Vec<f64>,
    pub metric: String,
    pub modality: String,
}

impl PairedRuns {
    pub fn new(
        baseline: Vec<f64>,
        proposed: Vec<f64>,
        metric: impl Into<String>,
        modality: impl Into<String>,
    ) -> Result<Self> {
        if baseline.len() != proposed.len() {
            return Err(Error::ShapeMismatch(
                "paired runs must align seed-by-seed".into(),
            ));
        }
        if baseline.len() < 3 {
            return Err(Error::SampleTooSmall {
                n: baseline.len(),
                min: 3,
                max: usize::MAX,
            });
        }
        Ok(Self {
            baseline,
            proposed,
            metric: metric.into(),
            modality: modality.into(),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormalityCheck {
    pub w: f64,
    pub p_value: f64,
    pub is_normal: bool,
    /// Sample was constant; the gate treats it as non-normal.
    pub constant_sample: bool,
}

fn normality_check(x: &[f64]) -> Result<NormalityCheck> {
    match shapiro_wilk(x) {
        Ok((w, p)) => Ok(NormalityCheck {
            w,
            p_value: p,
            is_normal: p > 0.05,
            constant_sample: false,
        }),
        Err(Error::ConstantSample) => Ok(NormalityCheck {
            w: 0.0,
            p_value: 0.0,
            is_normal: false,
            constant_sample: true,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    PairedT,
    Wilcoxon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    RejectH0,
    NotRejectH0,
}

/// Outcome of one paired comparison. H0: the proposed method's metric is not
/// less than the baseline's; rejecting certifies an improvement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub metric: String,
    pub modality: String,
    pub test_used: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub normality_baseline: NormalityCheck,
    pub normality_proposed: NormalityCheck,
    pub alpha: f64,
    pub decision: Decision,
    /// The paired values were (effectively) identical; the test degenerated
    /// and the decision defaults to not rejecting.
    pub degenerate: bool,
}

/// Shapiro-Wilk gate on both vectors, then the appropriate one-sided test.
pub fn fairness_hypothesis_pipeline(runs: &PairedRuns, alpha: f64) -> Result<HypothesisReport> {
    let norm_b = normality_check(&runs.baseline)?;
    let norm_p = normality_check(&runs.proposed)?;
    let use_t = norm_b.is_normal && norm_p.is_normal;
    let outcome = if use_t {
        paired_t(&runs.proposed, &runs.baseline)
    } else {
        wilcoxon_signed(&runs.proposed, &runs.baseline)
    };
    let (statistic, p_value, degenerate) = match outcome {
        Ok((s, p)) => (s, p, false),
        Err(Error::ZeroVariance) | Err(Error::AllZeroDifferences) => (0.0, 1.0, true),
        Err(e) => return Err(e),
    };
    let decision = if !degenerate && p_value < alpha {
        Decision::RejectH0
    } else {
        Decision::NotRejectH0
    };
    Ok(HypothesisReport {
        metric: runs.metric.clone(),
        modality: runs.modality.clone(),
        test_used: if use_t {
            TestKind::PairedT
        } else {
            TestKind::Wilcoxon
        },
        statistic,
        p_value,
        normality_baseline: norm_b,
        normality_proposed: norm_p,
        alpha,
        decision,
        degenerate,
    })
}
