//! Synthetic two-view dataset with planted canonical correlations, an
//! attribute built from exponentiated feature blends, and labels biased by
//! that attribute.
//!
//! The joint covariance is assembled so that the planted `U`, `V`, `rho` are
//! exactly the population canonical structure: with orthonormal `U` (QR
//! factor `Q = U`, `R = I`),
//!
//!   Sigma_x  = U U' + eps_x (I - U U')
//!   Sigma_xy = Sigma_x U diag(rho) V' Sigma_y = U diag(rho) V'
//!
//! whose whitened cross-covariance has SVD `U diag(rho) V'` by construction.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cca::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::seeding;

const MAX_RETRIES: usize = 10;

/// Generator parameters. `coeff_a` / `coeff_b` may be given explicitly; by
/// default they are drawn once per dataset as the leading planted direction
/// (restricted to the odd/even columns) scaled by `attr_align`, plus
/// `N(0, (attr_noise)^2 / count)` noise. That ties the sensitive attribute to
/// the shared latent factor, which is what makes the attribute visible to the
/// canonical projections downstream.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    #[serde(default = "default_n")]
    pub n_samples: usize,
    #[serde(default = "default_dx")]
    pub dim_x: usize,
    #[serde(default = "default_dy")]
    pub dim_y: usize,
    #[serde(default = "default_rho")]
    pub planted_rho: Vec<f64>,
    #[serde(default = "default_noise")]
    pub noise_x: f64,
    #[serde(default = "default_noise")]
    pub noise_y: f64,
    /// Mean vectors; `None` means zero.
    #[serde(default)]
    pub mean_x: Option<Vec<f64>>,
    #[serde(default)]
    pub mean_y: Option<Vec<f64>>,
    #[serde(default = "default_blend")]
    pub alpha: f64,
    #[serde(default = "default_blend")]
    pub beta: f64,
    #[serde(default)]
    pub coeff_a: Option<Vec<f64>>,
    #[serde(default)]
    pub coeff_b: Option<Vec<f64>>,
    #[serde(default = "default_align")]
    pub attr_align: f64,
    #[serde(default = "default_attr_noise")]
    pub attr_noise: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_n() -> usize {
    500
}
fn default_dx() -> usize {
    55
}
fn default_dy() -> usize {
    60
}
fn default_rho() -> Vec<f64> {
    vec![0.8, 0.6, 0.3, 0.5]
}
fn default_noise() -> f64 {
    0.1
}
fn default_blend() -> f64 {
    0.5
}
fn default_align() -> f64 {
    1.25
}
fn default_attr_noise() -> f64 {
    0.45
}
fn default_seed() -> u64 {
    42
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_samples: default_n(),
            dim_x: default_dx(),
            dim_y: default_dy(),
            planted_rho: default_rho(),
            noise_x: default_noise(),
            noise_y: default_noise(),
            mean_x: None,
            mean_y: None,
            alpha: default_blend(),
            beta: default_blend(),
            coeff_a: None,
            coeff_b: None,
            attr_align: default_align(),
            attr_noise: default_attr_noise(),
            seed: default_seed(),
        }
    }
}

impl SynthConfig {
    /// Count of odd-indexed X columns (1-based 1,3,5,...).
    pub fn count_a(&self) -> usize {
        self.dim_x.div_ceil(2)
    }

    /// Count of even-indexed Y columns (1-based 2,4,6,...).
    pub fn count_b(&self) -> usize {
        self.dim_y / 2
    }

    pub fn rank(&self) -> usize {
        self.planted_rho.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if self.dim_x < 2 || self.dim_y < 2 {
            return Err(Error::InvalidParameter(
                "dim_x and dim_y must be at least 2".into(),
            ));
        }
        let r = self.rank();
        if r == 0 || r > self.dim_x.min(self.dim_y) {
            return Err(Error::RankTooLarge {
                requested: r,
                max: self.dim_x.min(self.dim_y),
            });
        }
        if self.planted_rho.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(Error::InvalidParameter(
                "planted correlations must lie strictly inside (0, 1)".into(),
            ));
        }
        if !(self.noise_x > 0.0 && self.noise_y > 0.0) {
            return Err(Error::InvalidParameter("noise levels must be > 0".into()));
        }
        if let Some(a) = &self.coeff_a {
            if a.len() != self.count_a() {
                return Err(Error::InvalidParameter(format!(
                    "coeff_a must have length {}",
                    self.count_a()
                )));
            }
        }
        if let Some(b) = &self.coeff_b {
            if b.len() != self.count_b() {
                return Err(Error::InvalidParameter(format!(
                    "coeff_b must have length {}",
                    self.count_b()
                )));
            }
        }
        if let Some(m) = &self.mean_x {
            if m.len() != self.dim_x {
                return Err(Error::InvalidParameter("mean_x length mismatch".into()));
            }
        }
        if let Some(m) = &self.mean_y {
            if m.len() != self.dim_y {
                return Err(Error::InvalidParameter("mean_y length mismatch".into()));
            }
        }
        Ok(())
    }
}

/// The planted projection pair and correlations a dataset was built from.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub config: SynthConfig,
    pub x: DataMatrix,
    pub y: DataMatrix,
    /// Group memberships in {1, 2}.
    pub z: Vec<u8>,
    /// Class labels in {1, 2}.
    pub labels: Vec<u8>,
    pub ground_truth: GroundTruth,
    /// Diagonal jitter added during the PSD repair (0 when none was needed).
    pub psd_jitter: f64,
    /// Coefficients actually used for the attribute blend.
    pub coeff_a: Vec<f64>,
    pub coeff_b: Vec<f64>,
}

/// Column-orthonormal matrix distributed per the Haar measure, via QR of a
/// standard Gaussian matrix with the R-diagonal sign correction.
pub fn haar_orthonormal(d: usize, r: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    if r > d {
        return Err(Error::RankTooLarge {
            requested: r,
            max: d,
        });
    }
    let g = DMatrix::from_fn(d, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..r {
        if rr[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// Joint (Dx+Dy) covariance with the planted canonical structure. Returns the
/// symmetrized, PSD-repaired matrix and the jitter added to the diagonal.
pub fn build_joint_covariance(
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    rho: &[f64],
    eps_x: f64,
    eps_y: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let dx = u.nrows();
    let dy = v.nrows();
    let r = rho.len();
    if u.ncols() != r || v.ncols() != r {
        return Err(Error::ShapeMismatch(
            "U/V column counts must match the number of planted correlations".into(),
        ));
    }
    let sigma_x = view_covariance(u, eps_x);
    let sigma_y = view_covariance(v, eps_y);
    let diag_rho = DMatrix::from_fn(r, r, |i, j| if i == j { rho[i] } else { 0.0 });
    let sigma_xy = &sigma_x * u * diag_rho * v.transpose() * &sigma_y;

    let d = dx + dy;
    let mut joint = DMatrix::zeros(d, d);
    joint.view_mut((0, 0), (dx, dx)).copy_from(&sigma_x);
    joint.view_mut((0, dx), (dx, dy)).copy_from(&sigma_xy);
    joint
        .view_mut((dx, 0), (dy, dx))
        .copy_from(&sigma_xy.transpose());
    joint.view_mut((dx, dx), (dy, dy)).copy_from(&sigma_y);
    // Exact symmetry by construction of the repair step.
    let joint = (&joint + joint.transpose()) * 0.5;

    let (eigs, _) = linalg::sym_eigen_sorted(&joint);
    let min_eig = eigs[0];
    if min_eig < -1e-6 {
        return Err(Error::NotPSD {
            min_eigenvalue: min_eig,
        });
    }
    let jitter = if min_eig < 0.0 {
        min_eig.abs() + 1e-10
    } else {
        0.0
    };
    let repaired = if jitter > 0.0 {
        &joint + DMatrix::identity(d, d) * jitter
    } else {
        joint
    };
    Ok((repaired, jitter))
}

/// `Sigma = Q (R')^+ R^+ Q' + eps (I - Q Q')` for the QR factors of the
/// planted projection; for orthonormal input this is `U U' + eps (I - U U')`.
fn view_covariance(u: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let d = u.nrows();
    let r = u.ncols();
    let qr = u.clone().qr();
    let q = qr.q();
    let rr = qr.r();
    let r_inv = rr
        .solve_upper_triangular(&DMatrix::identity(r, r))
        .expect("planted projection has full column rank");
    let core = &q * (&r_inv * r_inv.transpose()).transpose() * q.transpose();
    let complement = DMatrix::identity(d, d) - &q * q.transpose();
    core + complement * eps
}

struct PlantedJoint {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    chol: DMatrix<f64>,
    jitter: f64,
    coeff_a: Vec<f64>,
    coeff_b: Vec<f64>,
}

fn plant_structure(config: &SynthConfig) -> Result<PlantedJoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(config.seed, seeding::SYNTH_STRUCTURE));
    let r = config.rank();
    let u = haar_orthonormal(config.dim_x, r, &mut rng)?;
    let v = haar_orthonormal(config.dim_y, r, &mut rng)?;
    let na = config.count_a();
    let nb = config.count_b();
    let coeff_a = match &config.coeff_a {
        Some(a) => a.clone(),
        None => {
            let sd = config.attr_noise / (na.max(1) as f64).sqrt();
            (0..na)
                .map(|j| {
                    config.attr_align * u[(2 * j, 0)] + sd * rng.sample::<f64, _>(StandardNormal)
                })
                .collect()
        }
    };
    let coeff_b = match &config.coeff_b {
        Some(b) => b.clone(),
        None => {
            let sd = config.attr_noise / (nb.max(1) as f64).sqrt();
            (0..nb)
                .map(|k| {
                    config.attr_align * v[(2 * k + 1, 0)]
                        + sd * rng.sample::<f64, _>(StandardNormal)
                })
                .collect()
        }
    };
    let (joint, jitter) =
        build_joint_covariance(&u, &v, &config.planted_rho, config.noise_x, config.noise_y)?;
    let chol = cholesky_with_escalation(joint)?;
    Ok(PlantedJoint {
        u,
        v,
        chol,
        jitter,
        coeff_a,
        coeff_b,
    })
}

/// Cholesky of the repaired covariance; escalates tiny diagonal jitter when
/// the matrix is PSD but numerically on the boundary.
fn cholesky_with_escalation(mut m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = m.nrows();
    let mut jitter = 1e-12;
    for _ in 0..4 {
        if let Some(c) = m.clone().cholesky() {
            return Ok(c.l());
        }
        m += DMatrix::identity(d, d) * jitter;
        jitter *= 100.0;
    }
    let (eigs, _) = linalg::sym_eigen_sorted(&m);
    Err(Error::NotPSD {
        min_eigenvalue: eigs[0],
    })
}

fn draw_views(
    config: &SynthConfig,
    planted: &PlantedJoint,
    rng: &mut ChaCha8Rng,
) -> (DataMatrix, DataMatrix) {
    let n = config.n_samples;
    let dx = config.dim_x;
    let dy = config.dim_y;
    let d = dx + dy;
    let mut x = DMatrix::zeros(n, dx);
    let mut y = DMatrix::zeros(n, dy);
    let mut g = DVector::zeros(d);
    for i in 0..n {
        for k in 0..d {
            g[k] = rng.sample::<f64, _>(StandardNormal);
        }
        let row = &planted.chol * &g;
        for j in 0..dx {
            let mu = config.mean_x.as_ref().map_or(0.0, |m| m[j]);
            x[(i, j)] = mu + row[j];
        }
        for j in 0..dy {
            let mu = config.mean_y.as_ref().map_or(0.0, |m| m[j]);
            y[(i, j)] = mu + row[dx + j];
        }
    }
    (
        DataMatrix::new(x).expect("generated views are finite"),
        DataMatrix::new(y).expect("generated views are finite"),
    )
}

/// Samples the two Gaussian views for a config (fresh planted structure).
pub fn sample_views(
    config: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(DataMatrix, DataMatrix)> {
    config.validate()?;
    let planted = plant_structure(config)?;
    Ok(draw_views(config, &planted, rng))
}

/// Sensitive attribute from exponentiated blends of odd X / even Y columns,
/// thresholded at the mean score: group 1 below or at the mean, group 2 above.
pub fn gen_sensitive(
    x: &DataMatrix,
    y: &DataMatrix,
    alpha: f64,
    beta: f64,
    a: &[f64],
    b: &[f64],
) -> Result<Vec<u8>> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "gen_sensitive")?;
    let odd_count = x.n_features().div_ceil(2);
    let even_count = y.n_features() / 2;
    if a.len() != odd_count || b.len() != even_count {
        return Err(Error::ShapeMismatch(format!(
            "coefficient lengths must be {odd_count} (odd X columns) and {even_count} (even Y columns)"
        )));
    }
    let n = x.n_samples();
    let mut raw = vec![0.0; n];
    for (i, slot) in raw.iter_mut().enumerate() {
        let mut sx = 0.0;
        for (j, aj) in a.iter().enumerate() {
            sx += aj * x.values()[(i, 2 * j)];
        }
        let mut sy = 0.0;
        for (k, bk) in b.iter().enumerate() {
            sy += bk * y.values()[(i, 2 * k + 1)];
        }
        *slot = alpha * sx.exp() + beta * sy.exp();
        if !slot.is_finite() {
            return Err(Error::InvalidParameter(
                "attribute score overflowed; rescale the coefficients".into(),
            ));
        }
    }
    let tau = raw.iter().sum::<f64>() / n as f64;
    if raw.iter().all(|v| *v == raw[0]) {
        return Err(Error::DegenerateAttribute);
    }

    Ok(raw.iter().map(|v| if *v <= tau { 1 } else { 2 }).collect())
}

/// Labels from the first half of X columns, the latter half of Y columns
/// (both 1-based inclusive ranges) and `exp(z)` with `z` in {1, 2},
/// thresholded at the mean.
pub fn gen_labels(x: &DataMatrix, y: &DataMatrix, z: &[u8]) -> Result<Vec<u8>> {
    linalg::check_same_rows(x.n_samples(), y.n_samples(), "gen_labels")?;
    linalg::check_same_rows(x.n_samples(), z.len(), "gen_labels attribute")?;
    if z.iter().any(|g| *g != 1 && *g != 2) {
        return Err(Error::InvalidParameter("z entries must be 1 or 2".into()));
    }
    let n = x.n_samples();
    let dx = x.n_features();
    let dy = y.n_features();
    let x_end = dx / 2; // 1-based columns 1..=floor(dx/2)
    let y_start = dy / 2; // 1-based columns floor(dy/2)..=dy
    if y_start == 0 {
        return Err(Error::InvalidParameter(
            "dim_y must be at least 2 for label generation".into(),
        ));
    }
    let mut c = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..x_end {
            s += x.values()[(i, j)];
        }
        for j in (y_start - 1)..dy {
            s += y.values()[(i, j)];
        }
        c[i] = s + (z[i] as f64).exp();
    }
    if c.iter().all(|v| *v == c[0]) {
        return Err(Error::DegenerateLabels);
    }
    let t = c.iter().sum::<f64>() / n as f64;
    Ok(c.iter().map(|v| if *v <= t { 1 } else { 2 }).collect())
}

/// Full dataset generation; deterministic in the config (including seed).
/// Degenerate attribute/label draws retry with a derived sub-seed.
pub fn generate_dataset(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let planted = plant_structure(config)?;
    for attempt in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive_indexed(
            config.seed,
            seeding::SYNTH_VIEWS,
            attempt as u64,
        ));
        let (x, y) = draw_views(config, &planted, &mut rng);
        let z = match gen_sensitive(
            &x,
            &y,
            config.alpha,
            config.beta,
            &planted.coeff_a,
            &planted.coeff_b,
        ) {
            Ok(z) => z,
            Err(Error::DegenerateAttribute) => continue,
            Err(e) => return Err(e),
        };
        let labels = match gen_labels(&x, &y, &z) {
            Ok(l) => l,
            Err(Error::DegenerateLabels) => continue,
            Err(e) => return Err(e),
        };
        let has_both = |v: &[u8]| v.contains(&1) && v.contains(&2);
        if !has_both(&z) || !has_both(&labels) {
            continue;
        }
        return Ok(SynthDataset {
            config: config.clone(),
            x,
            y,
            z,
            labels,
            ground_truth: GroundTruth {
                u: planted.u.clone(),
                v: planted.v.clone(),
                rho: config.planted_rho.clone(),
            },
            psd_jitter: planted.jitter,
            coeff_a: planted.coeff_a.clone(),
            coeff_b: planted.coeff_b.clone(),
        });
    }
    Err(Error::RetryExhausted(MAX_RETRIES))
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a SynthConfig,
    psd_jitter: f64,
    coeff_a: &'a [f64],
    coeff_b: &'a [f64],
    ground_truth_rho: &'a [f64],
    ground_truth_u: Vec<Vec<f64>>,
    ground_truth_v: Vec<Vec<f64>>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("f{j}")).collect();
    writeln!(f, "{}", header.join(","))?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

fn write_column_csv(path: &Path, header: &str, v: &[u8]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for item in v {
        writeln!(f, "{item}")?;
    }
    Ok(())
}

impl SynthDataset {
    /// Writes x.csv, y.csv, z.csv, labels.csv and manifest.json into `dir`.
    /// Floats use the shortest representation that parses back bit-exactly.
    pub fn write_to_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        write_matrix_csv(&dir.join("x.csv"), self.x.values())?;
        write_matrix_csv(&dir.join("y.csv"), self.y.values())?;
        write_column_csv(&dir.join("z.csv"), "z", &self.z)?;
        write_column_csv(&dir.join("labels.csv"), "label", &self.labels)?;
        let manifest = Manifest {
            config: &self.config,
            psd_jitter: self.psd_jitter,
            coeff_a: &self.coeff_a,
            coeff_b: &self.coeff_b,
            ground_truth_rho: &self.ground_truth.rho,
            ground_truth_u: matrix_rows(&self.ground_truth.u),
            ground_truth_v: matrix_rows(&self.ground_truth.v),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = haar_orthonormal(6, 3, &mut rng).unwrap();
        let gram = q.transpose() * &q;
        assert!(linalg::max_abs(&(gram - DMatrix::identity(3, 3))) <= 1e-10);
        assert!(matches!(
            haar_orthonormal(2, 3, &mut rng),
            Err(Error::RankTooLarge { .. })
        ));
    }

    #[test]
    fn haar_one_dim_is_plus_minus_one() {
        let mut plus = 0;
        let mut minus = 0;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = haar_orthonormal(1, 1, &mut rng).unwrap();
            assert_abs_diff_eq!(q[(0, 0)].abs(), 1.0, epsilon = 1e-12);
            if q[(0, 0)] > 0.0 {
                plus += 1;
            } else {
                minus += 1;
            }
        }
        // Both signs occur; equal probability checked loosely.
        assert!(plus > 60 && minus > 60, "plus {plus} minus {minus}");
    }

    #[test]
    fn joint_covariance_spectrum_for_orthonormal_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_orthonormal(6, 2, &mut rng).unwrap();
        let eps = 0.1;
        let sigma_x = view_covariance(&u, eps);
        let (eigs, _) = linalg::sym_eigen_sorted(&sigma_x);
        // Eigenvalues are {eps (x4), 1 (x2)}.
        for i in 0..4 {
            assert_abs_diff_eq!(eigs[i], eps, epsilon = 1e-10);
        }
        for i in 4..6 {
            assert_abs_diff_eq!(eigs[i], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn joint_covariance_symmetric_and_psd_near_unit_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = haar_orthonormal(5, 2, &mut rng).unwrap();
        let v = haar_orthonormal(4, 2, &mut rng).unwrap();
        let (joint, _) = build_joint_covariance(&u, &v, &[0.999, 0.99], 1e-3, 1e-3).unwrap();
        assert_eq!(linalg::max_abs(&(&joint - joint.transpose())), 0.0);
        let (eigs, _) = linalg::sym_eigen_sorted(&joint);
        assert!(eigs[0] > -1e-10, "min eigenvalue {}", eigs[0]);
    }

    #[test]
    fn sensitive_hand_example() {
        let x =
            DataMatrix::from_rows(&[vec![0.0], vec![2.0_f64.ln()], vec![3.0_f64.ln()]]).unwrap();
        let y = DataMatrix::from_rows(&[vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        let z = gen_sensitive(&x, &y, 1.0, 0.0, &[1.0], &[]).unwrap();
        assert_eq!(z, vec![1, 1, 2]);
    }

    #[test]
    fn sensitive_degenerate_when_blends_vanish() {
        let x = DataMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let y = DataMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            gen_sensitive(&x, &y, 0.0, 0.0, &[1.0], &[]),
            Err(Error::DegenerateAttribute)
        ));
    }

    #[test]
    fn labels_hand_example() {
        let x = DataMatrix::from_rows(&[vec![1.0, 9.0], vec![2.0, 9.0]]).unwrap();
        let y = DataMatrix::from_rows(&[vec![9.0, 0.0], vec![9.0, 0.0]]).unwrap();
        let labels = gen_labels(&x, &y, &[1, 1]).unwrap();
        assert_eq!(labels, vec![1, 2]);
    }

    #[test]
    fn labels_shift_invariant_under_constant_z() {
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![4.0, 0.0]]).unwrap();
        let y = DataMatrix::from_rows(&[vec![0.0, 0.5], vec![0.0, 0.1], vec![0.0, 0.2]]).unwrap();
        let l1 = gen_labels(&x, &y, &[1, 1, 1]).unwrap();
        let l2 = gen_labels(&x, &y, &[2, 2, 2]).unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = SynthConfig {
            n_samples: 40,
            dim_x: 6,
            dim_y: 8,
            planted_rho: vec![0.7, 0.4],
            seed: 11,
            ..SynthConfig::default()
        };
        let d1 = generate_dataset(&config).unwrap();
        let d2 = generate_dataset(&config).unwrap();
        assert_eq!(d1.x.values(), d2.x.values());
        assert_eq!(d1.y.values(), d2.y.values());
        assert_eq!(d1.z, d2.z);
        assert_eq!(d1.labels, d2.labels);
        assert_eq!(d1.x.n_samples(), 40);
        assert_eq!(d1.x.n_features(), 6);
        assert_eq!(d1.y.n_features(), 8);
        assert!(d1.z.iter().all(|g| *g == 1 || *g == 2));
        assert!(d1.labels.iter().all(|g| *g == 1 || *g == 2));
    }

    #[test]
    fn default_config_shapes() {
        let config = SynthConfig::default();
        let data = generate_dataset(&config).unwrap();
        assert_eq!((data.x.n_samples(), data.x.n_features()), (500, 55));
        assert_eq!((data.y.n_samples(), data.y.n_features()), (500, 60));
    }
}
