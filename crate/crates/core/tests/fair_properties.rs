//! Constraint satisfaction, group blindness and reduced-space equivalence of
//! the fair fit.

use faircca_core::{
    center_sensitive, fairness_gamma, fit_cca, fit_frcca, nullspace_basis, standardize, DataMatrix,
    SynthConfig,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn small_synth(seed: u64) -> (DataMatrix, DataMatrix, faircca_core::SensitiveVector) {
    let config = SynthConfig {
        n_samples: 120,
        dim_x: 6,
        dim_y: 7,
        planted_rho: vec![0.7, 0.4],
        seed,
        ..SynthConfig::default()
    };
    let data = faircca_core::generate_dataset(&config).unwrap();
    let groups: Vec<u8> = data.z.iter().map(|g| g - 1).collect();
    let z = center_sensitive(&groups).unwrap();
    (data.x, data.y, z)
}

#[test]
fn constraint_residuals_below_tolerance_on_synthetic_data() {
    for seed in 0..8 {
        let (x, y, z) = small_synth(seed);
        let model = fit_frcca(&x, &y, &z, 2, 1e-8).unwrap();
        let (xs, _) = standardize(&x).unwrap();
        let (ys, _) = standardize(&y).unwrap();
        let gx = (model.u().transpose() * xs.values().transpose() * z.centered()).amax();
        let gy = (model.v().transpose() * ys.values().transpose() * z.centered()).amax();
        assert!(gx <= 1e-8 && gy <= 1e-8, "seed {seed}: residuals {gx} {gy}");
    }
}

#[test]
fn any_linear_readout_is_uncorrelated_with_the_attribute() {
    let (x, y, z) = small_synth(3);
    let model = fit_frcca(&x, &y, &z, 2, 1e-8).unwrap();
    let proj = model.project(&x, faircca_core::Side::X).unwrap();
    let n = proj.n_samples() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let w = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
        let readout = proj.values() * &w;
        // Sample covariance with z: readout' z_centered / n (z is centered).
        let cov = readout.dot(z.centered()) / n;
        assert!(cov.abs() <= 1e-8, "covariance {cov}");
    }
}

#[test]
fn reduced_space_fit_lifts_exactly() {
    let (x, y, z) = small_synth(11);
    let fair = fit_frcca(&x, &y, &z, 2, 1e-8).unwrap();
    let (xs, _) = standardize(&x).unwrap();
    let (ys, _) = standardize(&y).unwrap();
    let rx = nullspace_basis(&x, &z).unwrap();
    let ry = nullspace_basis(&y, &z).unwrap();
    let xr = DataMatrix::new(xs.values() * rx.basis()).unwrap();
    let yr = DataMatrix::new(ys.values() * ry.basis()).unwrap();
    // The reduced views are already centered; a plain fit on them matches the
    // inner model, and lifting reproduces the fair projections.
    let inner = faircca_core::cca::fit_cca_unscaled(&xr, &yr, 2, 1e-8).unwrap();
    let lifted_u = rx.basis() * inner.u();
    let lifted_v = ry.basis() * inner.v();
    assert!((lifted_u - fair.u()).amax() <= 1e-10);
    assert!((lifted_v - fair.v()).amax() <= 1e-10);
    for r in 0..2 {
        assert!((inner.rho()[r] - fair.rho()[r]).abs() <= 1e-10);
    }
}

#[test]
fn frcca_matches_restricted_restart_maximizer() {
    // Oracle in the reduced spaces: maximize the ridged correlation over
    // directions constrained to the two nullspaces.
    let ridge = 1e-6;
    for seed in 0..6 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let n = 200;
        let latent: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let x = DataMatrix::new(DMatrix::from_fn(n, 3, |i, j| {
            let e: f64 = rng.sample(StandardNormal);
            latent[i] * (0.5 + 0.1 * j as f64) + e
        }))
        .unwrap();
        let y = DataMatrix::new(DMatrix::from_fn(n, 3, |i, j| {
            let e: f64 = rng.sample(StandardNormal);
            latent[i] * (0.6 - 0.1 * j as f64) + e
        }))
        .unwrap();
        let groups: Vec<u8> = (0..n).map(|i| (latent[i] > 0.2) as u8).collect();
        let z = match center_sensitive(&groups) {
            Ok(z) => z,
            Err(_) => continue,
        };
        let fair = fit_frcca(&x, &y, &z, 1, ridge).unwrap();
        let (xs, _) = standardize(&x).unwrap();
        let (ys, _) = standardize(&y).unwrap();
        let rx = nullspace_basis(&x, &z).unwrap();
        let ry = nullspace_basis(&y, &z).unwrap();
        let xr = xs.values() * rx.basis();
        let yr = ys.values() * ry.basis();
        let oracle = faircca_testkit::max_correlation_restarts(&xr, &yr, ridge, 10_000, seed);
        assert!(
            (fair.rho()[0] - oracle).abs() <= 1e-4,
            "seed {seed}: fair {} vs oracle {oracle}",
            fair.rho()[0]
        );
    }
}

#[test]
fn gamma_positive_for_plain_cca_on_leaky_data() {
    for seed in 0..5 {
        let (x, y, z) = small_synth(40 + seed);
        let plain = fit_cca(&x, &y, 2, 1e-8).unwrap();
        let gamma = fairness_gamma(&plain, &x, &y, &z).unwrap();
        assert!(
            gamma.iter().all(|g| *g > 0.0),
            "seed {seed}: gamma {gamma:?}"
        );
    }
}

#[test]
fn requesting_full_rank_fails_on_reduced_dimension() {
    let (x, y, z) = small_synth(2);
    // min(Dx, Dy) = 6 exceeds min(Dx-1, Dy-1) = 5.
    let err = fit_frcca(&x, &y, &z, 6, 1e-8).unwrap_err();
    assert!(matches!(
        err,
        faircca_core::Error::RankTooLarge {
            requested: 6,
            max: 5
        }
    ));
}
