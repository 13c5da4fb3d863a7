//! Kernel SVM trained by sequential minimal optimization.
//!
//! The working pair is the maximal violating pair: the most violated
//! direction in `I_up` against the most violated in `I_low`, with the
//! standard duality-gap stopping rule `m - M <= tol`. Each accepted step
//! solves the two-variable subproblem exactly, so the dual objective is
//! non-decreasing and the solver terminates deterministically.

use nalgebra::DMatrix;

use crate::cca::DataMatrix;
use crate::error::{Error, Result};

use super::{targets_pm1, KernelSpec};

const KKT_TOL: f64 = 1e-3;
const MAX_PASSES: usize = 10_000;

#[derive(Debug, Clone)]
pub struct SvmModel {
    support_rows: DMatrix<f64>,
    support_indices: Vec<usize>,
    /// `alpha_i * t_i` per support vector.
    dual_coefs: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    gamma: f64,
    c: f64,
}

impl SvmModel {
    pub fn n_features(&self) -> usize {
        self.support_rows.ncols()
    }

    pub fn n_support(&self) -> usize {
        self.support_indices.len()
    }

    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Resolved kernel coefficient actually used.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `f(x) = sum_i alpha_i t_i k(x_i, x) - b`.
    pub fn decision_function(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        if x.n_features() != self.n_features() {
            return Err(Error::ShapeMismatch(format!(
                "model expects {} features, got {}",
                self.n_features(),
                x.n_features()
            )));
        }
        let xv = x.values();
        Ok((0..x.n_samples())
            .map(|i| {
                let row: Vec<f64> = (0..xv.ncols()).map(|j| xv[(i, j)]).collect();
                let mut s = -self.bias;
                for (k, coef) in self.dual_coefs.iter().enumerate() {
                    let sv: Vec<f64> = (0..self.support_rows.ncols())
                        .map(|j| self.support_rows[(k, j)])
                        .collect();
                    s += coef * self.kernel.eval(self.gamma, &sv, &row);
                }
                s
            })
            .collect())
    }
}

struct Smo<'a> {
    k: DMatrix<f64>,
    t: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    /// Bias-free margins `f_i = sum_j alpha_j t_j K_ij`.
    f: Vec<f64>,
}

impl<'a> Smo<'a> {
    fn new(k: DMatrix<f64>, t: &'a [f64], c: f64) -> Self {
        let n = t.len();
        Self {
            k,
            t,
            c,
            alpha: vec![0.0; n],
            f: vec![0.0; n],
        }
    }

    fn dual_objective(&self) -> f64 {
        // W = sum(alpha) - 1/2 sum_i alpha_i t_i f_i with f maintained.
        let linear: f64 = self.alpha.iter().sum();
        let quad: f64 = (0..self.t.len())
            .map(|i| self.alpha[i] * self.t[i] * self.f[i])
            .sum();
        linear - 0.5 * quad
    }

    fn in_up(&self, i: usize) -> bool {
        (self.t[i] > 0.0 && self.alpha[i] < self.c) || (self.t[i] < 0.0 && self.alpha[i] > 0.0)
    }

    fn in_low(&self, i: usize) -> bool {
        (self.t[i] < 0.0 && self.alpha[i] < self.c) || (self.t[i] > 0.0 && self.alpha[i] > 0.0)
    }

    /// Violation score: `-y_i g_i = t_i - f_i`.
    fn score(&self, i: usize) -> f64 {
        self.t[i] - self.f[i]
    }

    /// Most violating pair, or `None` once `m - M <= tol`.
    fn violating_pair(&self) -> Option<(usize, usize, f64)> {
        let n = self.t.len();
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for i in 0..n {
            let s = self.score(i);
            if self.in_up(i) && up.is_none_or(|(_, best)| s > best) {
                up = Some((i, s));
            }
            if self.in_low(i) && low.is_none_or(|(_, best)| s < best) {
                low = Some((i, s));
            }
        }
        let (i, m) = up?;
        let (j, m_low) = low?;
        let gap = m - m_low;
        if gap <= KKT_TOL {
            None
        } else {
            Some((i, j, gap))
        }
    }

    /// Exact two-variable update (Platt's algebra on bias-free errors);
    /// returns false when the pair admits no progress.
    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.t[i1], self.t[i2]);
        let (alph1, alph2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.f[i1] - y1, self.f[i2] - y2);
        let s = y1 * y2;
        let (low, high) = if s < 0.0 {
            let d = alph2 - alph1;
            (d.max(0.0), (self.c + d).min(self.c))
        } else {
            let sum = alph2 + alph1;
            ((sum - self.c).max(0.0), sum.min(self.c))
        };
        if low >= high {
            return false;
        }
        let k11 = self.k[(i1, i1)];
        let k12 = self.k[(i1, i2)];
        let k22 = self.k[(i2, i2)];
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (alph2 + y2 * (e1 - e2) / eta).clamp(low, high)
        } else {
            // Indefinite direction: compare the subproblem objective at the
            // clip endpoints (minimization form).
            let f1 = y1 * e1 - alph1 * k11 - s * alph2 * k12;
            let f2 = y2 * e2 - s * alph1 * k12 - alph2 * k22;
            let l1 = alph1 + s * (alph2 - low);
            let h1 = alph1 + s * (alph2 - high);
            let lobj = l1 * f1
                + low * f2
                + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22
                + s * low * l1 * k12;
            let hobj = h1 * f1
                + high * f2
                + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22
                + s * high * h1 * k12;
            if lobj < hobj - 1e-12 {
                low
            } else if hobj < lobj - 1e-12 {
                high
            } else {
                return false;
            }
        };
        // Snap to the box corners before judging significance, so a step
        // that rounds back to the current state is rejected rather than
        // looping forever.
        if a2 < 1e-12 {
            a2 = 0.0;
        } else if a2 > self.c - 1e-12 {
            a2 = self.c;
        }
        if (a2 - alph2).abs() < 1e-12 * (a2 + alph2 + 1e-12) {
            return false;
        }
        let mut a1 = (alph1 + s * (alph2 - a2)).clamp(0.0, self.c);
        if a1 < 1e-12 {
            a1 = 0.0;
        } else if a1 > self.c - 1e-12 {
            a1 = self.c;
        }

        let d1 = y1 * (a1 - alph1);
        let d2 = y2 * (a2 - alph2);
        for i in 0..self.t.len() {
            self.f[i] += d1 * self.k[(i1, i)] + d2 * self.k[(i2, i)];
        }
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        true
    }

    /// Threshold so that `u_i = f_i - b` satisfies the KKT conditions:
    /// the mean bias-free error over free support vectors, or the midpoint
    /// of the feasible interval when none are free.
    fn threshold(&self) -> f64 {
        let n = self.t.len();
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..n {
            if self.alpha[i] > 0.0 && self.alpha[i] < self.c {
                sum += self.f[i] - self.t[i];
                count += 1;
            }
        }
        if count > 0 {
            return sum / count as f64;
        }
        let mut up_min = f64::INFINITY;
        let mut low_max = f64::NEG_INFINITY;
        for i in 0..n {
            let e = self.f[i] - self.t[i];
            if self.in_up(i) {
                up_min = up_min.min(e);
            }
            if self.in_low(i) {
                low_max = low_max.max(e);
            }
        }
        if up_min.is_finite() && low_max.is_finite() {
            0.5 * (up_min + low_max)
        } else {
            0.0
        }
    }
}

/// Trains the SVM; see [`train_svm_traced`] for the per-pass dual objective.
pub fn train_svm(x: &DataMatrix, y: &[u8], c: f64, kernel: KernelSpec) -> Result<SvmModel> {
    train_svm_impl(x, y, c, kernel, false).map(|(m, _)| m)
}

/// Same fit, also returning the dual objective once per outer pass
/// (non-decreasing; useful as a solver diagnostic).
pub fn train_svm_traced(
    x: &DataMatrix,
    y: &[u8],
    c: f64,
    kernel: KernelSpec,
) -> Result<(SvmModel, Vec<f64>)> {
    train_svm_impl(x, y, c, kernel, true)
}

fn train_svm_impl(
    x: &DataMatrix,
    y: &[u8],
    c: f64,
    kernel: KernelSpec,
    trace: bool,
) -> Result<(SvmModel, Vec<f64>)> {
    if x.n_samples() != y.len() {
        return Err(Error::ShapeMismatch(
            "label count must match the row count".into(),
        ));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter("C must be > 0".into()));
    }
    let targets = targets_pm1(y)?;
    let gamma = kernel.resolve_gamma(x.values())?;
    let n = x.n_samples();
    let xv = x.values();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..xv.ncols()).map(|j| xv[(i, j)]).collect())
        .collect();
    let k = DMatrix::from_fn(n, n, |i, j| kernel.eval(gamma, &rows[i], &rows[j]));

    let mut smo = Smo::new(k, &targets, c);
    let mut objective_trace = Vec::new();
    let mut steps_in_pass = 0usize;
    let mut passes = 0usize;
    while let Some((i, j, _)) = smo.violating_pair() {
        let mut advanced = smo.take_step(i, j);
        if !advanced {
            // The extreme pair is numerically stuck; try the up-index against
            // every other low candidate before declaring convergence.
            let candidates: Vec<usize> = (0..n).filter(|&m| smo.in_low(m)).collect();
            for &m in &candidates {
                if smo.take_step(i, m) {
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            break;
        }
        steps_in_pass += 1;
        if steps_in_pass >= n {
            steps_in_pass = 0;
            passes += 1;
            if trace {
                objective_trace.push(smo.dual_objective());
            }
            if passes >= MAX_PASSES {
                return Err(Error::NonConvergence { passes: MAX_PASSES });
            }
        }
    }
    if trace {
        objective_trace.push(smo.dual_objective());
    }

    let bias = smo.threshold();
    let support: Vec<usize> = (0..n).filter(|&i| smo.alpha[i] > 1e-12).collect();
    let support_rows = DMatrix::from_fn(support.len(), xv.ncols(), |i, j| xv[(support[i], j)]);
    let dual_coefs: Vec<f64> = support.iter().map(|&i| smo.alpha[i] * targets[i]).collect();
    Ok((
        SvmModel {
            support_rows,
            support_indices: support,
            dual_coefs,
            bias,
            kernel,
            gamma,
            c,
        },
        objective_trace,
    ))
}
