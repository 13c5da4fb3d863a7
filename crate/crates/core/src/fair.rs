//! Fair representation CCA: remove the sensitive direction from each view by
//! restricting the projections to the nullspace of `X' z_centered`, then run
//! plain CCA in the reduced spaces and lift the solution back.
//!
//! Every linear functional of the resulting representation has zero sample
//! covariance with the sensitive attribute on the training data.

use nalgebra::{DMatrix, DVector};

use crate::cca::{
    fit_cca_on_standardized, fmt_float, fmt_matrix_rows, fmt_vec, rows_to_matrix, standardize,
    CanonicalModel, DataMatrix, ModelDoc, Side, Standardizer,
};
use crate::error::{Error, Result};
use crate::linalg;

/// Binary sensitive attribute with its centered form.
#[derive(Debug, Clone)]
pub struct SensitiveVector {
    groups: Vec<u8>,
    centered: DVector<f64>,
}

/// How the attribute vector enters the nullspace construction. Any nonzero
/// rescaling of the centered vector spans the same removed direction, so the
/// choice only matters for bit-compatibility comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZScaling {
    #[default]
    Centered,
    Standardized,
}

impl SensitiveVector {
    /// Builds the centered form of a {0,1} group vector.
    pub fn from_groups(groups: Vec<u8>) -> Result<Self> {
        if groups.iter().any(|g| *g > 1) {
            return Err(Error::InvalidParameter(
                "group entries must be 0 or 1".into(),
            ));
        }
        let n = groups.len();
        let ones = groups.iter().filter(|g| **g == 1).count();
        if n == 0 || ones == 0 || ones == n {
            return Err(Error::DegenerateAttribute);
        }
        let mean = ones as f64 / n as f64;
        let centered = DVector::from_fn(n, |i, _| groups[i] as f64 - mean);
        Ok(Self { groups, centered })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[u8] {
        &self.groups
    }

    /// Centered attribute; sums to zero.
    pub fn centered(&self) -> &DVector<f64> {
        &self.centered
    }

    /// Centered and scaled to unit population std.
    pub fn standardized(&self) -> DVector<f64> {
        let n = self.centered.len() as f64;
        let sd = (self.centered.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        &self.centered / sd
    }

    fn vector_for(&self, scaling: ZScaling) -> DVector<f64> {
        match scaling {
            ZScaling::Centered => self.centered.clone(),
            ZScaling::Standardized => self.standardized(),
        }
    }

    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Self::from_groups(idx.iter().map(|&i| self.groups[i]).collect())
    }
}

/// Centers a {0,1} group vector. Kept as a free function to mirror the
/// pipeline steps; equivalent to [`SensitiveVector::from_groups`].
pub fn center_sensitive(groups: &[u8]) -> Result<SensitiveVector> {
    SensitiveVector::from_groups(groups.to_vec())
}

/// Orthonormal basis of the hyperplane orthogonal to the attribute direction
/// `X_hat' z_centered` in feature space.
#[derive(Debug, Clone)]
pub struct NullspaceBasis {
    basis: DMatrix<f64>,
    removed_direction: DVector<f64>,
}

impl NullspaceBasis {
    /// D x (D-1), orthonormal columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Unit vector along `X_hat' z_centered`, the direction removed.
    pub fn removed_direction(&self) -> &DVector<f64> {
        &self.removed_direction
    }

    pub(crate) fn from_direction(w: &DVector<f64>) -> Result<Self> {
        if w.norm() < 1e-10 {
            return Err(Error::AttributeOrthogonal);
        }
        if w.len() < 2 {
            return Err(Error::RankTooLarge {
                requested: 1,
                max: 0,
            });
        }
        let basis = linalg::orthogonal_complement(w);
        let mut dir = w / w.norm();
        let mut as_matrix = DMatrix::from_column_slice(dir.len(), 1, dir.as_slice());
        linalg::fix_column_signs(&mut as_matrix);
        dir = as_matrix.column(0).into_owned();
        Ok(Self {
            basis,
            removed_direction: dir,
        })
    }
}

/// Builds the nullspace basis from raw data: standardizes `x`, forms
/// `X_hat' z_centered` and returns the orthonormal complement.
pub fn nullspace_basis(x: &DataMatrix, z: &SensitiveVector) -> Result<NullspaceBasis> {
    linalg::check_same_rows(x.n_samples(), z.len(), "nullspace_basis")?;
    let (xs, _) = standardize(x)?;
    let w = xs.values().transpose() * z.centered();
    NullspaceBasis::from_direction(&w)
}

/// Fair CCA model: the reduced-space fit plus the lifted projections and the
/// nullspace bases used to lift them.
#[derive(Debug, Clone)]
pub struct FairCanonicalModel {
    inner: CanonicalModel,
    lifted: CanonicalModel,
    rx: NullspaceBasis,
    ry: NullspaceBasis,
}

impl FairCanonicalModel {
    /// The CCA model fitted on the nullspace-reduced views.
    pub fn inner(&self) -> &CanonicalModel {
        &self.inner
    }

    /// The lifted model: `U = Rx Lambda_x`, `V = Ry Lambda_y`, with the raw
    /// data standardizers. All projection utilities accept it directly.
    pub fn as_canonical(&self) -> &CanonicalModel {
        &self.lifted
    }

    pub fn u(&self) -> &DMatrix<f64> {
        self.lifted.u()
    }

    pub fn v(&self) -> &DMatrix<f64> {
        self.lifted.v()
    }

    pub fn rho(&self) -> &[f64] {
        self.lifted.rho()
    }

    pub fn rank(&self) -> usize {
        self.lifted.rank()
    }

    pub fn rx(&self) -> &NullspaceBasis {
        &self.rx
    }

    pub fn ry(&self) -> &NullspaceBasis {
        &self.ry
    }

    pub fn project(&self, x: &DataMatrix, side: Side) -> Result<DataMatrix> {
        crate::cca::project(x, &self.lifted, side)
    }

    pub fn to_json(&self) -> String {
        let base = &self.lifted;
        format!(
            "{{\"R\":{},\"ridge\":{},\"rho\":{},\"U\":{},\"V\":{},\"x_mean\":{},\"x_std\":{},\"y_mean\":{},\"y_std\":{},\"rx\":{},\"ry\":{},\"method\":\"frcca\"}}",
            base.rank(),
            fmt_float(base.ridge()),
            fmt_vec(base.rho().iter().copied()),
            fmt_matrix_rows(base.u()),
            fmt_matrix_rows(base.v()),
            fmt_vec(base.x_standardizer().means().iter().copied()),
            fmt_vec(base.x_standardizer().stds().iter().copied()),
            fmt_vec(base.y_standardizer().means().iter().copied()),
            fmt_vec(base.y_standardizer().stds().iter().copied()),
            fmt_matrix_rows(self.rx.basis()),
            fmt_matrix_rows(self.ry.basis()),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if doc.method.as_deref() != Some("frcca") {
            return Err(Error::ModelFormat("document is not an frcca model".into()));
        }
        let rx_rows = doc
            .rx
            .clone()
            .ok_or_else(|| Error::ModelFormat("missing rx".into()))?;
        let ry_rows = doc
            .ry
            .clone()
            .ok_or_else(|| Error::ModelFormat("missing ry".into()))?;
        let rx_mat = rows_to_matrix(&rx_rows, "rx")?;
        let ry_mat = rows_to_matrix(&ry_rows, "ry")?;
        let lifted = doc.into_canonical()?;
        let rank = lifted.rank();
        let ridge = lifted.ridge();
        let rho = lifted.rho().to_vec();
        // Reduced-space projections: Lambda = Rx' U (Rx has orthonormal columns).
        let lambda_x = rx_mat.transpose() * lifted.u();
        let lambda_y = ry_mat.transpose() * lifted.v();
        let inner = CanonicalModel::from_parts(
            lambda_x,
            lambda_y,
            rho,
            rank,
            ridge,
            Standardizer::identity(rx_mat.ncols()),
            Standardizer::identity(ry_mat.ncols()),
        );
        let rx = NullspaceBasis {
            removed_direction: residual_direction(&rx_mat),
            basis: rx_mat,
        };
        let ry = NullspaceBasis {
            removed_direction: residual_direction(&ry_mat),
            basis: ry_mat,
        };
        Ok(Self {
            inner,
            lifted,
            rx,
            ry,
        })
    }
}

/// Unit vector orthogonal to all columns of a D x (D-1) orthonormal basis.
fn residual_direction(basis: &DMatrix<f64>) -> DVector<f64> {
    let d = basis.nrows();
    let proj = basis * basis.transpose();
    // Pick the coordinate axis with the largest residual, then orthogonalize.
    let mut best = 0;
    let mut best_norm = -1.0;
    for j in 0..d {
        let mut resid_sq = 1.0 - proj[(j, j)];
        if resid_sq < 0.0 {
            resid_sq = 0.0;
        }
        if resid_sq > best_norm {
            best_norm = resid_sq;
            best = j;
        }
    }
    let mut e = DVector::zeros(d);
    e[best] = 1.0;
    let mut r = &e - &proj * &e;
    r /= r.norm();
    let mut as_matrix = DMatrix::from_column_slice(d, 1, r.as_slice());
    linalg::fix_column_signs(&mut as_matrix);
    as_matrix.column(0).into_owned()
}

/// FR-CCA fit with the default centered attribute scaling.
pub fn fit_frcca(
    x: &DataMatrix,
    y: &DataMatrix,
    z: &SensitiveVector,
    rank: usize,
    ridge: f64,
) -> Result<FairCanonicalModel> {
    fit_frcca_with(x, y, z, rank, ridge, ZScaling::Centered)
}

/// FR-CCA fit with an explicit attribute scaling mode.
pub fn fit_frcca_with(
    x: &DataMatrix,
    y: &DataMatrix,
    z: &SensitiveVector,
    rank: usize,
    ridge: f64,
    scaling: ZScaling,
) -> Result<FairCanonicalModel> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "fit_frcca")?;
    linalg::check_same_rows(x.n_samples(), z.len(), "fit_frcca attribute")?;
    let max_rank = (x.n_features() - 1).min(y.n_features() - 1);
    if rank == 0 || rank > max_rank {
        return Err(Error::RankTooLarge {
            requested: rank,
            max: max_rank,
        });
    }
    let (xs, sx) = standardize(x)?;
    let (ys, sy) = standardize(y)?;
    let zv = z.vector_for(scaling);
    let wx = xs.values().transpose() * &zv;
    let wy = ys.values().transpose() * &zv;
    let rx = NullspaceBasis::from_direction(&wx)?;
    let ry = NullspaceBasis::from_direction(&wy)?;
    let xr = xs.values() * rx.basis();
    let yr = ys.values() * ry.basis();
    let inner = fit_cca_on_standardized(
        &xr,
        &yr,
        rank,
        ridge,
        Standardizer::identity(xr.ncols()),
        Standardizer::identity(yr.ncols()),
    )?;
    let u = rx.basis() * inner.u();
    let v = ry.basis() * inner.v();
    let lifted = CanonicalModel::from_parts(u, v, inner.rho().to_vec(), rank, ridge, sx, sy);
    Ok(FairCanonicalModel {
        inner,
        lifted,
        rx,
        ry,
    })
}

/// Per-dimension unsupervised unfairness: magnitude of the attribute
/// covariance of each canonical variate, averaged over the two views.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMode {
    /// `(|gx_r| + |gy_r|) / 2`; signed entries could cancel between views.
    #[default]
    Magnitude,
    /// `(gx_r + gy_r) / 2`, the raw average.
    Signed,
}

pub fn fairness_gamma(
    model: &CanonicalModel,
    x: &DataMatrix,
    y: &DataMatrix,
    z: &SensitiveVector,
) -> Result<Vec<f64>> {
    fairness_gamma_with(model, x, y, z, GammaMode::Magnitude)
}

pub fn fairness_gamma_with(
    model: &CanonicalModel,
    x: &DataMatrix,
    y: &DataMatrix,
    z: &SensitiveVector,
    mode: GammaMode,
) -> Result<Vec<f64>> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "fairness_gamma")?;
    linalg::check_same_rows(x.n_samples(), z.len(), "fairness_gamma attribute")?;
    if x.n_features() != model.u().nrows() || y.n_features() != model.v().nrows() {
        return Err(Error::ShapeMismatch(
            "data dimensions do not match the model".into(),
        ));
    }
    let xs = model.x_standardizer().apply_raw(x.values());
    let ys = model.y_standardizer().apply_raw(y.values());
    let gx = model.u().transpose() * xs.transpose() * z.centered();
    let gy = model.v().transpose() * ys.transpose() * z.centered();
    Ok((0..model.rank())
        .map(|r| match mode {
            GammaMode::Magnitude => (gx[r].abs() + gy[r].abs()) / 2.0,
            GammaMode::Signed => (gx[r] + gy[r]) / 2.0,
        })
        .collect())
}

/// What a percentage change measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PctKind {
    /// Correlation: positive means the proposed method correlates more.
    Corr,
    /// Fairness: positive means the proposed method is fairer (smaller gamma).
    Fair,
}

/// Per-dimension percentage change of the proposed method against a baseline.
pub fn pct_change(proposed: &[f64], baseline: &[f64], kind: PctKind) -> Result<Vec<f64>> {
    if proposed.len() != baseline.len() {
        return Err(Error::ShapeMismatch(format!(
            "pct_change: lengths differ ({} vs {})",
            proposed.len(),
            baseline.len()
        )));
    }
    let mut out = Vec::with_capacity(proposed.len());
    for (r, (p, b)) in proposed.iter().zip(baseline).enumerate() {
        if *b == 0.0 {
            return Err(Error::ZeroBaseline(r));
        }
        let delta = (p - b) / b * 100.0;
        out.push(match kind {
            PctKind::Corr => delta,
            PctKind::Fair => -delta,
        });
    }
    Ok(out)
}


#[cfg(test)]
mod scaling_mode_tests {
    use super::*;

    fn data() -> (DataMatrix, DataMatrix, SensitiveVector) {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 0.3, -0.2],
            vec![2.0, -1.0, 0.4],
            vec![0.5, 0.8, 1.5],
            vec![-1.0, 0.1, 0.6],
            vec![0.2, 2.0, -0.9],
            vec![1.4, 0.5, 0.3],
        ])
        .unwrap();
        let y = DataMatrix::from_rows(&[
            vec![0.4, 1.0, 0.0],
            vec![1.9, -0.5, 0.7],
            vec![0.1, 0.9, -0.3],
            vec![-0.8, 0.2, 0.5],
            vec![0.9, 1.8, 0.2],
            vec![1.0, 0.0, -0.6],
        ])
        .unwrap();
        let z = center_sensitive(&[0, 1, 0, 1, 1, 0]).unwrap();
        (x, y, z)
    }

    #[test]
    fn standardized_attribute_spans_the_same_nullspace() {
        // Any nonzero rescaling of z_centered defines the same removed
        // direction, so both scaling modes fit identical projections.
        let (x, y, z) = data();
        let a = fit_frcca_with(&x, &y, &z, 2, 1e-8, ZScaling::Centered).unwrap();
        let b = fit_frcca_with(&x, &y, &z, 2, 1e-8, ZScaling::Standardized).unwrap();
        assert!((a.u() - b.u()).amax() <= 1e-10);
        assert!((a.v() - b.v()).amax() <= 1e-10);
    }

    #[test]
    fn signed_gamma_can_cancel_where_magnitudes_do_not() {
        let (x, y, z) = data();
        let plain = crate::cca::fit_cca(&x, &y, 2, 1e-8).unwrap();
        let magnitude = fairness_gamma_with(&plain, &x, &y, &z, GammaMode::Magnitude).unwrap();
        let signed = fairness_gamma_with(&plain, &x, &y, &z, GammaMode::Signed).unwrap();
        for (m, s) in magnitude.iter().zip(&signed) {
            assert!(s.abs() <= m + 1e-12, "signed {s} exceeds magnitude {m}");
        }
    }
}
