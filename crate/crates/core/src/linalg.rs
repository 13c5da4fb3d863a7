//! Dense linear-algebra helpers shared by the CCA and generator modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as zero when inverting covariances.
pub const EIG_FLOOR: f64 = 1e-12;

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let d = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = DVector::from_fn(d, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Inverse symmetric square root of a positive definite matrix.
///
/// Fails with `SingularCovariance` when any eigenvalue falls below the floor;
/// silently truncating would hide rank deficiency from the caller.
pub fn inverse_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eigen_sorted(m);
    let min = values[0];
    if min < EIG_FLOOR {
        return Err(Error::SingularCovariance {
            min_eigenvalue: min,
        });
    }
    let scaled = DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            values[i].powf(-0.5)
        } else {
            0.0
        }
    });
    Ok(&vectors * scaled * vectors.transpose())
}

/// Flip each column so its largest-magnitude entry is positive. Returns the
/// applied signs so paired matrices can be flipped consistently.
pub fn fix_column_signs(m: &mut DMatrix<f64>) -> Vec<f64> {
    let mut signs = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut best = 0usize;
        for i in 0..m.nrows() {
            if m[(i, j)].abs() > m[(best, j)].abs() {
                best = i;
            }
        }
        let s = if m[(best, j)] < 0.0 { -1.0 } else { 1.0 };
        if s < 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
        signs.push(s);
    }
    signs
}

/// Orthonormal basis of the orthogonal complement of a single vector,
/// via one Householder reflector. The result is D x (D-1); its columns
/// together with `w / |w|` form an orthonormal basis of R^D.
pub fn orthogonal_complement(w: &DVector<f64>) -> DMatrix<f64> {
    let d = w.len();
    assert!(d >= 1, "empty direction");
    let u = w / w.norm();
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = u.clone();
    v[0] += sign;
    let vtv = v.dot(&v);
    // H = I - 2 v v' / (v'v); column 0 spans u, columns 1.. span the complement.
    let mut h = DMatrix::identity(d, d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] -= 2.0 * v[i] * v[j] / vtv;
        }
    }
    let mut basis = h.columns(1, d - 1).into_owned();
    fix_column_signs(&mut basis);
    basis
}

/// Maximum absolute entry of a matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Require equal row counts, with a readable message.
pub fn check_same_rows(n1: usize, n2: usize, what: &str) -> Result<()> {
    if n1 != n2 {
        return Err(Error::ShapeMismatch(format!(
            "{what}: row counts differ ({n1} vs {n2})"
        )));
    }
    Ok(())
}
