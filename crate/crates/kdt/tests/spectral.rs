//! Root-solver checks that cross module boundaries: eigenfunction moments
//! via the velocity grid, and the derivative identity at the root.

mod support;

use kdt::dispersion::{z_prime, Branch, SQRT_HALF_PI};
use kdt::dvm::VelocityGrid;
use kdt::spectral::{
    critical_wavenumber, eigenfunction, lambda_asymptotic, solve_eigenvalue, ModeParams, Regime,
};
use num_complex::Complex64;

fn params(tau: f64, k: f64) -> ModeParams {
    ModeParams::new(tau, k, 3).unwrap()
}

#[test]
fn eigenfunction_velocity_integral_is_one() {
    let grid = VelocityGrid::gauss_hermite(128).unwrap();
    for (tau, k) in [(0.2, 1.0), (0.1, 2.0), (0.05, 3.0)] {
        let p = params(tau, k);
        let eig = solve_eigenvalue(&p, 1e-12).unwrap();
        let mut total = Complex64::new(0.0, 0.0);
        for (&v, &w) in grid.nodes().iter().zip(grid.weights()) {
            total += w * eigenfunction(&p, &eig, v).unwrap();
        }
        assert!(
            (total - 1.0).norm() <= 1e-12,
            "tau = {tau}, k = {k}: integral {total}"
        );
    }
}

#[test]
fn eigenfunction_is_refused_off_the_subcritical_regime() {
    let p = params(1.0, 2.0);
    let eig = solve_eigenvalue(&p, 1e-12).unwrap();
    assert_eq!(eig.regime, Regime::Supercritical);
    assert!(eigenfunction(&p, &eig, 0.0).is_err());
}

#[test]
fn regime_flips_across_the_critical_wavenumber() {
    let kc = critical_wavenumber(1.0).unwrap();
    assert_eq!(kc, SQRT_HALF_PI);

    let below = solve_eigenvalue(&params(1.0, kc * (1.0 - 1e-6)), 1e-12).unwrap();
    assert_eq!(below.regime, Regime::Subcritical);

    let above = solve_eigenvalue(&params(1.0, kc * (1.0 + 1e-6)), 1e-12).unwrap();
    assert_eq!(above.regime, Regime::Supercritical);

    let at = solve_eigenvalue(&params(1.0, kc), 1e-12).unwrap();
    assert_eq!(at.regime, Regime::Critical);
    assert_eq!(at.lambda, Complex64::new(-1.0, 0.0));
    assert_eq!(at.iterations, 0);
}

#[test]
fn supercritical_root_satisfies_the_derivative_identity() {
    // At the continued root, Z'(zeta_hat) = tau lambda; the root
    // coordinate and derivative are pinned to 40-digit references.
    for (beta, y_ref, zp_ref) in [
        (1.3, support::Y_STAR_BETA_13, support::Z_PRIME_BETA_13),
        (2.0, support::Y_STAR_BETA_2, support::Z_PRIME_BETA_2),
        (3.0, support::Y_STAR_BETA_3, support::Z_PRIME_BETA_3),
    ] {
        let p = params(1.0, beta);
        let eig = solve_eigenvalue(&p, 1e-12).unwrap();
        assert_eq!(eig.regime, Regime::Supercritical);
        assert_eq!(eig.zeta_hat.re, 0.0);
        assert!(
            (eig.zeta_hat.im - y_ref).abs() <= 1e-13 * y_ref.abs(),
            "beta = {beta}: Im zeta_hat = {}",
            eig.zeta_hat.im
        );

        let zp = z_prime(eig.zeta_hat, Branch::Upper).unwrap().value;
        assert!((zp.re - zp_ref).abs() <= 1e-12 * zp_ref.abs());
        assert!(zp.im.abs() <= 1e-12);
        assert!(
            (zp - eig.lambda).norm() <= 1e-12 * zp.norm(),
            "beta = {beta}: Z' = {zp}, tau lambda = {}",
            eig.lambda
        );
    }
}

#[test]
fn two_term_series_tracks_the_solver_in_the_hydrodynamic_window() {
    for (tau, k, tol) in [(0.1, 1.0, 1e-3), (0.05, 1.0, 1e-4), (0.025, 1.0, 2e-5)] {
        let p = params(tau, k);
        let eig = solve_eigenvalue(&p, 1e-12).unwrap();
        let series = lambda_asymptotic(&p);
        assert!(
            (eig.lambda.re - series).abs() <= tol * eig.lambda.re.abs(),
            "tau = {tau}: solver {} vs series {series}",
            eig.lambda.re
        );
    }
}
