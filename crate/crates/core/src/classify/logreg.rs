//! L2-regularized logistic regression, Newton steps with backtracking.

use nalgebra::{DMatrix, DVector};

use crate::cca::DataMatrix;
use crate::error::{Error, Result};

const MAX_NEWTON_STEPS: usize = 200;
const GRAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LogregModel {
    weights: DVector<f64>,
    bias: f64,
    lambda: f64,
}

impl LogregModel {
    #[cfg(test)]
    pub(crate) fn from_parts(weights: Vec<f64>, bias: f64, lambda: f64) -> Self {
        Self {
            weights: DVector::from_vec(weights),
            bias,
            lambda,
        }
    }

    pub fn weights(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn decision_function(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        if x.n_features() != self.n_features() {
            return Err(Error::ShapeMismatch(format!(
                "model expects {} features, got {}",
                self.n_features(),
                x.n_features()
            )));
        }
        Ok((0..x.n_samples())
            .map(|i| {
                let mut s = self.bias;
                for j in 0..x.n_features() {
                    s += self.weights[j] * x.values()[(i, j)];
                }
                s
            })
            .collect())
    }
}

/// Objective minimized by [`train_logreg`]: mean-free negative log-likelihood
/// plus `lambda/2 * |w|^2` (bias unpenalized). Public so tests can compare
/// against finite differences.
pub fn logreg_loss(x: &DataMatrix, y: &[u8], lambda: f64, weights: &[f64], bias: f64) -> f64 {
    let mut loss = 0.0;
    for (i, label) in y.iter().enumerate() {
        let target = if *label == 2 { 1.0 } else { -1.0 };
        let mut s = bias;
        for (j, w) in weights.iter().enumerate() {
            s += w * x.values()[(i, j)];
        }
        let m = -target * s;
        // ln(1 + e^m), stable for large |m|.
        loss += if m > 30.0 { m } else { m.exp().ln_1p() };
    }
    loss + 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Trains to gradient norm <= 1e-8. The problem is strictly convex for
/// `lambda > 0`; with `lambda = 0` and separable data there is no finite
/// optimum and the fit reports non-convergence.
pub fn train_logreg(x: &DataMatrix, y: &[u8], lambda: f64) -> Result<LogregModel> {
    if x.n_samples() != y.len() {
        return Err(Error::ShapeMismatch(
            "label count must match the row count".into(),
        ));
    }
    if x.n_samples() < 2 {
        return Err(Error::ShapeMismatch("need at least two rows".into()));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter("lambda must be >= 0".into()));
    }
    let targets = super::targets_pm1(y)?;
    let n = x.n_samples();
    let d = x.n_features();

    // Augmented parameter vector theta = [w; b].
    let mut theta = DVector::zeros(d + 1);
    let xv = x.values();
    let feature = |i: usize, j: usize| -> f64 {
        if j < d {
            xv[(i, j)]
        } else {
            1.0
        }
    };

    let grad_and_loss = |theta: &DVector<f64>| -> (DVector<f64>, f64) {
        let mut grad = DVector::zeros(d + 1);
        let mut loss = 0.0;
        for i in 0..n {
            let mut s = theta[d];
            for j in 0..d {
                s += theta[j] * xv[(i, j)];
            }
            let m = -targets[i] * s;
            loss += if m > 30.0 { m } else { m.exp().ln_1p() };
            // d/ds ln(1+e^m) * dm/ds = sigma(m) * (-t); stable at both tails.
            let sig = 1.0 / (1.0 + (-m).exp());
            let coef = -targets[i] * sig;
            for j in 0..=d {
                grad[j] += coef * feature(i, j);
            }
        }
        for j in 0..d {
            grad[j] += lambda * theta[j];
            loss += 0.5 * lambda * theta[j] * theta[j];
        }
        (grad, loss)
    };

    let (mut grad, mut loss) = grad_and_loss(&theta);
    for _ in 0..MAX_NEWTON_STEPS {
        if grad.norm() <= GRAD_TOL {
            return Ok(LogregModel {
                weights: theta.rows(0, d).into_owned(),
                bias: theta[d],
                lambda,
            });
        }
        // Hessian: X' diag(p(1-p)) X + lambda on the weight block.
        let mut hess = DMatrix::zeros(d + 1, d + 1);
        for i in 0..n {
            let mut s = theta[d];
            for j in 0..d {
                s += theta[j] * xv[(i, j)];
            }
            let p = 1.0 / (1.0 + (-s).exp());
            let wgt = (p * (1.0 - p)).max(1e-12);
            for j in 0..=d {
                let fj = feature(i, j) * wgt;
                for k in j..=d {
                    hess[(j, k)] += fj * feature(i, k);
                }
            }
        }
        for j in 0..d {
            hess[(j, j)] += lambda;
        }
        hess[(d, d)] += 1e-12;
        for j in 0..=d {
            for k in 0..j {
                hess[(j, k)] = hess[(k, j)];
            }
        }
        let step = match hess.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => grad.clone() * (1.0 / (1.0 + grad.norm())),
        };
        // Backtracking on the loss keeps the iteration globally convergent.
        // Near the optimum the Newton improvement drops below the rounding
        // noise of the summed loss, so acceptance is noise-tolerant there.
        let noise = 1e-12 * (1.0 + loss.abs());
        let mut rate = 1.0;
        let mut advanced = false;
        for _ in 0..60 {
            let candidate = &theta - &step * rate;
            let (g, l) = grad_and_loss(&candidate);
            if l <= loss + noise {
                theta = candidate;
                grad = g;
                loss = l;
                advanced = true;
                break;
            }
            rate *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    if grad.norm() <= GRAD_TOL {
        Ok(LogregModel {
            weights: theta.rows(0, d).into_owned(),
            bias: theta[d],
            lambda,
        })
    } else {
        Err(Error::NonConvergence {
            passes: MAX_NEWTON_STEPS,
        })
    }
}
