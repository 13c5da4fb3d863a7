//! Classical canonical correlation analysis via covariance whitening and SVD.
//!
//! The fit maximizes `trace(U' X' Y V)` subject to whitening constraints on
//! both sides; with population covariances `Cxx`, `Cyy`, `Cxy` (all computed
//! on standardized views, ridge added to the diagonals) the solution is read
//! off the SVD of `Cxx^-1/2 Cxy Cyy^-1/2`.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Row-per-sample data matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a dense matrix. At least one row and one column; every entry
    /// finite. Operations that need sample statistics additionally require
    /// two or more rows.
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::ShapeMismatch(
                "data matrix must have at least one row and one column".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch(
                "data matrix contains non-finite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ShapeMismatch("no rows supplied".into()));
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(rows.len(), d, &flat))
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.values
    }

    /// Row subset in the given index order.
    pub fn select_rows(&self, idx: &[usize]) -> DataMatrix {
        let m = DMatrix::from_fn(idx.len(), self.n_features(), |i, j| {
            self.values[(idx[i], j)]
        });
        DataMatrix { values: m }
    }
}

/// Per-column centering and scaling parameters (population standard
/// deviations, matching the 1/N covariance convention).
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: DVector<f64>,
    stds: DVector<f64>,
}

impl Standardizer {
    /// Learns means and population stds. Rejects (near-)constant columns.
    pub fn fit(x: &DataMatrix) -> Result<Self> {
        let m = x.values();
        let n = m.nrows() as f64;
        let mut means = DVector::zeros(m.ncols());
        let mut stds = DVector::zeros(m.ncols());
        for j in 0..m.ncols() {
            let col = m.column(j);
            let mu = col.sum() / n;
            let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd < 1e-12 {
                return Err(Error::ConstantColumn(j));
            }
            means[j] = mu;
            stds[j] = sd;
        }
        Ok(Self { means, stds })
    }

    /// No-op standardizer (means 0, stds 1) for views that are already
    /// centered, e.g. nullspace-reduced data.
    pub fn identity(d: usize) -> Self {
        Self {
            means: DVector::zeros(d),
            stds: DVector::from_element(d, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn stds(&self) -> &DVector<f64> {
        &self.stds
    }

    pub fn apply(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.n_features() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "standardizer expects {} columns, got {}",
                self.dim(),
                x.n_features()
            )));
        }
        Ok(DataMatrix {
            values: self.apply_raw(x.values()),
        })
    }

    pub(crate) fn apply_raw(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            (m[(i, j)] - self.means[j]) / self.stds[j]
        })
    }

    pub fn inverse(&self, xhat: &DataMatrix) -> Result<DataMatrix> {
        if xhat.n_features() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "standardizer expects {} columns, got {}",
                self.dim(),
                xhat.n_features()
            )));
        }
        let m = xhat.values();
        let values = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            m[(i, j)] * self.stds[j] + self.means[j]
        });
        Ok(DataMatrix { values })
    }
}

/// Standardize all columns to mean 0 and population std 1.
pub fn standardize(x: &DataMatrix) -> Result<(DataMatrix, Standardizer)> {
    if x.n_samples() < 2 {
        return Err(Error::ShapeMismatch(
            "standardization needs at least two rows".into(),
        ));
    }
    let s = Standardizer::fit(x)?;
    let out = s.apply(x)?;
    Ok((out, s))
}

/// Which view a projection applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Fitted CCA model: projection pair, canonical correlations and the
/// standardization parameters needed to project new data.
#[derive(Debug, Clone)]
pub struct CanonicalModel {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    rho: Vec<f64>,
    rank: usize,
    ridge: f64,
    x_standardizer: Standardizer,
    y_standardizer: Standardizer,
}

impl CanonicalModel {
    pub(crate) fn from_parts(
        u: DMatrix<f64>,
        v: DMatrix<f64>,
        rho: Vec<f64>,
        rank: usize,
        ridge: f64,
        x_standardizer: Standardizer,
        y_standardizer: Standardizer,
    ) -> Self {
        Self {
            u,
            v,
            rho,
            rank,
            ridge,
            x_standardizer,
            y_standardizer,
        }
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Canonical correlations, non-increasing, clipped to [0, 1].
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn x_standardizer(&self) -> &Standardizer {
        &self.x_standardizer
    }

    pub fn y_standardizer(&self) -> &Standardizer {
        &self.y_standardizer
    }
}

/// Whitened-SVD CCA fit.
pub fn fit_cca(x: &DataMatrix, y: &DataMatrix, rank: usize, ridge: f64) -> Result<CanonicalModel> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "fit_cca")?;
    if x.n_samples() < 2 {
        return Err(Error::ShapeMismatch("fit needs at least two rows".into()));
    }
    let (xs, sx) = standardize(x)?;
    let (ys, sy) = standardize(y)?;
    fit_cca_on_standardized(xs.values(), ys.values(), rank, ridge, sx, sy)
}

/// CCA on views that are already centered; no standardization is applied and
/// identity parameters are stored. This is the fit the fair variant runs on
/// its nullspace-reduced views.
pub fn fit_cca_unscaled(
    x: &DataMatrix,
    y: &DataMatrix,
    rank: usize,
    ridge: f64,
) -> Result<CanonicalModel> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "fit_cca_unscaled")?;
    if x.n_samples() < 2 {
        return Err(Error::ShapeMismatch("fit needs at least two rows".into()));
    }
    fit_cca_on_standardized(
        x.values(),
        y.values(),
        rank,
        ridge,
        Standardizer::identity(x.n_features()),
        Standardizer::identity(y.n_features()),
    )
}

/// Fit on views that are already centered (and scaled however the caller
/// wants); the supplied standardizers are stored untouched. This is the entry
/// point the fair variant uses for nullspace-reduced views: re-scaling them
/// would break the exact transfer of the whitening constraint back to the
/// full space.
pub(crate) fn fit_cca_on_standardized(
    xs: &DMatrix<f64>,
    ys: &DMatrix<f64>,
    rank: usize,
    ridge: f64,
    x_standardizer: Standardizer,
    y_standardizer: Standardizer,
) -> Result<CanonicalModel> {
    let max_rank = xs.ncols().min(ys.ncols());
    if rank == 0 || rank > max_rank {
        return Err(Error::RankTooLarge {
            requested: rank,
            max: max_rank,
        });
    }
    if ridge.is_nan() || ridge < 0.0 {
        return Err(Error::InvalidParameter("ridge must be >= 0".into()));
    }
    let n = xs.nrows() as f64;
    let dx = xs.ncols();
    let dy = ys.ncols();
    let cxx = xs.transpose() * xs / n + DMatrix::identity(dx, dx) * ridge;
    let cyy = ys.transpose() * ys / n + DMatrix::identity(dy, dy) * ridge;
    let cxy = xs.transpose() * ys / n;
    let wx = linalg::inverse_sqrt_spd(&cxx)?;
    let wy = linalg::inverse_sqrt_spd(&cyy)?;
    let m = &wx * cxy * &wy;
    let svd = m.svd(true, true);
    let p = svd.u.expect("svd with u requested");
    let qt = svd.v_t.expect("svd with v_t requested");
    let mut u = (&wx * p).columns(0, rank).into_owned();
    let mut v = (&wy * qt.transpose()).columns(0, rank).into_owned();
    // Deterministic orientation: flip each pair so u_r's largest-magnitude
    // entry is positive; v_r follows to keep u_r' Cxy v_r = +sigma_r.
    let signs = linalg::fix_column_signs(&mut u);
    for (r, s) in signs.iter().enumerate() {
        if *s < 0.0 {
            for i in 0..v.nrows() {
                v[(i, r)] = -v[(i, r)];
            }
        }
    }
    let rho: Vec<f64> = (0..rank)
        .map(|r| svd.singular_values[r].clamp(0.0, 1.0))
        .collect();
    Ok(CanonicalModel {
        u,
        v,
        rho,
        rank,
        ridge,
        x_standardizer,
        y_standardizer,
    })
}

/// Standardize with the model's stored parameters, then project.
pub fn project(x: &DataMatrix, model: &CanonicalModel, side: Side) -> Result<DataMatrix> {
    let (proj, std) = match side {
        Side::X => (&model.u, &model.x_standardizer),
        Side::Y => (&model.v, &model.y_standardizer),
    };
    if x.n_features() != proj.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "projection expects {} columns, got {}",
            proj.nrows(),
            x.n_features()
        )));
    }
    let xs = std.apply_raw(x.values());
    DataMatrix::new(xs * proj)
}

/// Per-dimension canonical correlations of a model evaluated on (possibly
/// held-out) data: `rho_r = u_r' X' Y v_r / sqrt(u_r' X' X u_r * v_r' Y' Y v_r)`
/// on the standardized views.
pub fn canonical_correlations(
    model: &CanonicalModel,
    x: &DataMatrix,
    y: &DataMatrix,
) -> Result<Vec<f64>> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "canonical_correlations")?;
    if x.n_samples() < 2 {
        return Err(Error::ShapeMismatch("need at least two rows".into()));
    }
    if x.n_features() != model.u.nrows() || y.n_features() != model.v.nrows() {
        return Err(Error::ShapeMismatch(
            "data dimensions do not match the model".into(),
        ));
    }
    let xs = model.x_standardizer.apply_raw(x.values());
    let ys = model.y_standardizer.apply_raw(y.values());
    let xu = xs * &model.u;
    let yv = ys * &model.v;
    let mut out = Vec::with_capacity(model.rank);
    for r in 0..model.rank {
        let a = xu.column(r);
        let b = yv.column(r);
        let num = a.dot(&b);
        let da = a.dot(&a);
        let db = b.dot(&b);
        if da < 1e-14 || db < 1e-14 {
            return Err(Error::DegenerateDirection);
        }
        out.push(num / (da * db).sqrt());
    }
    Ok(out)
}

// --- JSON serialization -----------------------------------------------------
//
// Floats are written with 17 significant digits so a parse returns the exact
// f64 bits back.

pub(crate) fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v)
}

pub(crate) fn fmt_vec(v: impl IntoIterator<Item = f64>) -> String {
    let items: Vec<String> = v.into_iter().map(fmt_float).collect();
    format!("[{}]", items.join(","))
}

pub(crate) fn fmt_matrix_rows(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| fmt_vec((0..m.ncols()).map(|j| m[(i, j)])))
        .collect();
    format!("[{}]", rows.join(","))
}

impl CanonicalModel {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"R\":{},\"ridge\":{},\"rho\":{},\"U\":{},\"V\":{},\"x_mean\":{},\"x_std\":{},\"y_mean\":{},\"y_std\":{}}}",
            self.rank,
            fmt_float(self.ridge),
            fmt_vec(self.rho.iter().copied()),
            fmt_matrix_rows(&self.u),
            fmt_matrix_rows(&self.v),
            fmt_vec(self.x_standardizer.means.iter().copied()),
            fmt_vec(self.x_standardizer.stds.iter().copied()),
            fmt_vec(self.y_standardizer.means.iter().copied()),
            fmt_vec(self.y_standardizer.stds.iter().copied()),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        doc.into_canonical()
    }
}

#[derive(Deserialize)]
pub(crate) struct ModelDoc {
    #[serde(rename = "R")]
    pub r: usize,
    pub ridge: f64,
    pub rho: Vec<f64>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    pub x_mean: Vec<f64>,
    pub x_std: Vec<f64>,
    pub y_mean: Vec<f64>,
    pub y_std: Vec<f64>,
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub rx: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub ry: Option<Vec<Vec<f64>>>,
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::ModelFormat(format!("{what}: empty matrix")));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::ModelFormat(format!("{what}: ragged or empty rows")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), d, &flat))
}

impl ModelDoc {
    pub(crate) fn into_canonical(self) -> Result<CanonicalModel> {
        let u = rows_to_matrix(&self.u, "U")?;
        let v = rows_to_matrix(&self.v, "V")?;
        if self.rho.len() != self.r || u.ncols() != self.r || v.ncols() != self.r {
            return Err(Error::ModelFormat("rank fields disagree".into()));
        }
        if self.x_mean.len() != u.nrows() || self.x_std.len() != u.nrows() {
            return Err(Error::ModelFormat("x standardizer length mismatch".into()));
        }
        if self.y_mean.len() != v.nrows() || self.y_std.len() != v.nrows() {
            return Err(Error::ModelFormat("y standardizer length mismatch".into()));
        }
        Ok(CanonicalModel {
            rank: self.r,
            ridge: self.ridge,
            rho: self.rho,
            u,
            v,
            x_standardizer: Standardizer {
                means: DVector::from_vec(self.x_mean),
                stds: DVector::from_vec(self.x_std),
            },
            y_standardizer: Standardizer {
                means: DVector::from_vec(self.y_mean),
                stds: DVector::from_vec(self.y_std),
            },
        })
    }
}


#[cfg(test)]
mod identity_projection_tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_model_on_prewhitened_data_returns_input() {
        // A model whose projection is the identity and whose standardizers
        // are no-ops reproduces pre-whitened data exactly.
        let doc = r#"{"R":2,"ridge":0.0,"rho":[1.0,1.0],
            "U":[[1.0,0.0],[0.0,1.0]],"V":[[1.0,0.0],[0.0,1.0]],
            "x_mean":[0.0,0.0],"x_std":[1.0,1.0],
            "y_mean":[0.0,0.0],"y_std":[1.0,1.0]}"#;
        let model = CanonicalModel::from_json(doc).unwrap();
        let x = DataMatrix::from_rows(&[vec![0.3, -1.2], vec![1.4, 0.8], vec![-0.7, 0.1]]).unwrap();
        let out = project(&x, &model, Side::X).unwrap();
        for (a, b) in out.values().iter().zip(x.values().iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }
}
