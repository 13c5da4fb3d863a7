//! Independent numerical oracles for the faircca test suites.
//!
//! Everything here deliberately avoids the code paths it is used to check:
//! the correlation maximizer uses random restarts with alternating ascent
//! instead of an SVD, the t CDF is computed by adaptive quadrature of the
//! density instead of the incomplete beta function, and the Wilcoxon tail is
//! enumerated over all sign assignments.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

/// Maximum empirical correlation between `X a` and `Y b` over unit directions,
/// found by random restarts with alternating coordinate ascent.
///
/// `x` and `y` are expected to be column-centered. The Gram matrices carry the
/// same `ridge` as the fit under test so both sides optimize the identical
/// objective:
///
///   rho(a, b) = a' Cxy b / sqrt(a' (Cxx + ridge I) a * b' (Cyy + ridge I) b)
pub fn max_correlation_restarts(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    ridge: f64,
    restarts: usize,
    seed: u64,
) -> f64 {
    let n = x.nrows() as f64;
    let dx = x.ncols();
    let dy = y.ncols();
    let gx = x.transpose() * x / n + DMatrix::identity(dx, dx) * ridge;
    let gy = y.transpose() * y / n + DMatrix::identity(dy, dy) * ridge;
    let cxy = x.transpose() * y / n;

    let gx_chol = gx.clone().cholesky().expect("oracle: Gx not PD");
    let gy_chol = gy.clone().cholesky().expect("oracle: Gy not PD");

    let rho_of = |a: &DVector<f64>, b: &DVector<f64>| -> f64 {
        let num = (a.transpose() * &cxy * b)[(0, 0)];
        let da = (a.transpose() * &gx * a)[(0, 0)];
        let db = (b.transpose() * &gy * b)[(0, 0)];
        num / (da * db).sqrt()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..restarts {
        let mut a = DVector::from_fn(dx, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut b = DVector::from_fn(dy, |_, _| rng.sample::<f64, _>(StandardNormal));
        if a.norm() < 1e-300 || b.norm() < 1e-300 {
            continue;
        }
        let mut prev = -2.0;
        for _ in 0..200 {
            // Best b for fixed a: Gy^-1 Cxy' a, then best a for fixed b.
            b = gy_chol.solve(&(cxy.transpose() * &a));
            if b.norm() < 1e-300 {
                break;
            }
            b /= b.norm();
            a = gx_chol.solve(&(&cxy * &b));
            if a.norm() < 1e-300 {
                break;
            }
            a /= a.norm();
            let r = rho_of(&a, &b);
            if (r - prev).abs() < 1e-13 {
                prev = r;
                break;
            }
            prev = r;
        }
        // Sign: the ascent may settle on (-a, b); the objective is odd in a.
        if prev.abs() > best {
            best = prev.abs();
        }
    }
    best
}

/// Student-t CDF by adaptive Simpson quadrature of the density.
pub fn student_t_cdf_quadrature(t: f64, df: f64) -> f64 {
    let log_norm =
        ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let density = move |x: f64| (log_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let half = adaptive_simpson(&density, 0.0, t.abs(), 1e-12, 40);
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    recurse(f, a, b, simpson(f, a, b), tol, depth)
}

/// Exact one-sided (less) Wilcoxon signed-rank p-value by enumerating all
/// 2^n sign assignments over the observed (possibly tied) ranks.
/// Zero differences are dropped first, matching the classic method.
pub fn wilcoxon_enum_p_less(diffs: &[f64]) -> f64 {
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nonzero.len();
    assert!(n > 0 && n <= 20, "enumeration oracle limited to 1..=20");
    let ranks = average_ranks_of_abs(&nonzero);
    let w_obs: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let mut count = 0u64;
    for mask in 0u64..(1u64 << n) {
        let w: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if w <= w_obs + 1e-9 {
            count += 1;
        }
    }
    count as f64 / (1u64 << n) as f64
}

/// Average ranks (1-based) of |d|, ties sharing the mean rank.
pub fn average_ranks_of_abs(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].abs().partial_cmp(&d[j].abs()).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[idx[j + 1]].abs() == d[idx[i]].abs() {
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

/// Central finite-difference gradient of `f` at `x`.
pub fn central_difference_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

/// Plain Pearson correlation of two slices.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
