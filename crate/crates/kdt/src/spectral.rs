//! Critical wave number, the hydrodynamic eigenvalue, and its eigenfunction.
//!
//! The eigenvalue problem reduces to one real transcendental equation: on the
//! imaginary axis Z+(iy) = i s(y) with s real, strictly decreasing from +inf
//! to 0 across all of R, and s'(y) = y s(y) - 1 exactly. The root of
//! s(y) = tau |k| gives the eigenvalue lambda = (tau |k| y - 1)/tau through
//! the linear change of variables linking the resolvent coordinate to the
//! spectral one. Below the critical product tau |k| < sqrt(pi/2) the root has
//! y > 0 and lambda is a genuine isolated eigenvalue in (-1/tau, 0); above
//! it the root continues into y < 0 where lambda is a resonance coordinate
//! of the entire branch extension, not a point of the spectrum.

use crate::dispersion::SQRT_HALF_PI;
use crate::error::{Error, Result};
use crate::faddeeva;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Half-width of the band around tau|k| = sqrt(pi/2) classified as Critical.
pub const CRITICAL_BAND_HALF_WIDTH: f64 = 1e-12;

/// Validity bound for [`lambda_asymptotic`]: the two-term series is a useful
/// approximation for tau*|k| below this (used for solver seeding too).
pub const LAMBDA_ASYMPTOTIC_VALIDITY: f64 = 0.5;

/// Below this tau*|k| the eigenvalue is taken from the inverse-power series
/// instead of back-substituting the root (the product tau|k|*y - 1 loses
/// ~2 log10(1/(tau|k|)) digits to cancellation; the series truncation error
/// O((tau|k|)^7) is below 1 ulp here).
const SERIES_BETA_CUTOFF: f64 = 1e-3;

/// Mode parameters: relaxation time, wave-number magnitude, and the spatial
/// dimension (metadata only; every formula reduces to the 1D frame along k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    tau: f64,
    k_mag: f64,
    dim: u32,
}

impl ModeParams {
    pub fn new(tau: f64, k_mag: f64, dim: u32) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidParam {
                name: "tau",
                value: tau,
                constraint: "must be finite and > 0",
            });
        }
        if !k_mag.is_finite() || k_mag < 0.0 {
            return Err(Error::InvalidParam {
                name: "k_mag",
                value: k_mag,
                constraint: "must be finite and >= 0",
            });
        }
        if dim == 0 {
            return Err(Error::InvalidParam {
                name: "dim",
                value: 0.0,
                constraint: "must be >= 1",
            });
        }
        Ok(Self { tau, k_mag, dim })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn k_mag(&self) -> f64 {
        self.k_mag
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// The critical product tau * |k|; derived, never stored.
    pub fn beta(&self) -> f64 {
        self.tau * self.k_mag
    }
}

/// Position of tau|k| relative to the critical product sqrt(pi/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Supercritical,
    Critical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Subcritical => write!(f, "subcritical"),
            Regime::Supercritical => write!(f, "supercritical"),
            Regime::Critical => write!(f, "critical"),
        }
    }
}

/// Result of [`solve_eigenvalue`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResult {
    /// The eigenvalue (subcritical: real, in (-1/tau, 0)); supercritical:
    /// the resonance coordinate of the continued root, not an eigenvalue.
    pub lambda: Complex64,
    /// Root coordinate; purely imaginary by the reflection symmetry.
    pub zeta_hat: Complex64,
    /// |Z+(zeta_hat) - i tau |k|| at the returned root.
    pub residual: f64,
    pub iterations: usize,
    pub regime: Regime,
}

/// k_c(tau) = sqrt(pi/2)/tau, the largest |k| carrying an isolated mode.
pub fn critical_wavenumber(tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParam {
            name: "tau",
            value: tau,
            constraint: "must be finite and > 0",
        });
    }
    Ok(SQRT_HALF_PI / tau)
}

/// Two-term small-Knudsen eigenvalue series -tau k^2 + tau^3 k^4.
/// Useful for tau*|k| < [`LAMBDA_ASYMPTOTIC_VALIDITY`].
pub fn lambda_asymptotic(params: &ModeParams) -> f64 {
    let t = params.tau;
    let k2 = params.k_mag * params.k_mag;
    -t * k2 + t * t * t * k2 * k2
}

/// s(y) = Im Z+(iy), real for real y; strictly decreasing, s(0) = sqrt(pi/2).
/// The imaginary part of the underlying complex evaluation is pure roundoff
/// and is discarded.
fn s_im_axis(y: f64) -> Result<f64> {
    Ok(SQRT_HALF_PI * faddeeva::w(Complex64::new(0.0, y / SQRT_2))?.re)
}

/// s'(y) = y s(y) - 1, exact from the defining ODE of Z.
fn s_prime(y: f64, s: f64) -> f64 {
    y * s - 1.0
}

/// Solve s(y) = tau|k| for the purely imaginary root zeta_hat = i y and the
/// linked eigenvalue lambda = (tau|k| y - 1)/tau.
///
/// `tol` bounds the accepted residual |Z+(zeta_hat) - i tau|k||; accepted
/// range [1e-14, 1e-6]. The solver itself always polishes to the roundoff
/// floor (safeguarded Newton inside a sign-change bracket; s is globally
/// monotone so the bracket is guaranteed correct).
pub fn solve_eigenvalue(params: &ModeParams, tol: f64) -> Result<EigenResult> {
    if params.k_mag <= 0.0 {
        return Err(Error::InvalidParam {
            name: "k_mag",
            value: params.k_mag,
            constraint: "must be > 0 to define a mode",
        });
    }
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::InvalidParam {
            name: "tol",
            value: tol,
            constraint: "must lie in [1e-14, 1e-6]",
        });
    }
    let beta = params.beta();
    let tau = params.tau;

    if (beta - SQRT_HALF_PI).abs() <= CRITICAL_BAND_HALF_WIDTH {
        return Ok(EigenResult {
            lambda: Complex64::new(-1.0 / tau, 0.0),
            zeta_hat: Complex64::new(0.0, 0.0),
            residual: (SQRT_HALF_PI - beta).abs(),
            iterations: 0,
            regime: Regime::Critical,
        });
    }

    let regime = if beta < SQRT_HALF_PI {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };

    // Bracket [lo, hi] with s(lo) > beta > s(hi); s is strictly decreasing.
    let (mut lo, mut hi, seed) = match regime {
        Regime::Subcritical => {
            let mut hi = (1.0 / beta).max(2.0);
            let mut grow = 0;
            while s_im_axis(hi)? >= beta {
                hi *= 2.0;
                grow += 1;
                if grow > 60 {
                    return Err(Error::NoBracket { lo: 0.0, hi });
                }
            }
            // Seed from the small-Knudsen series through the root link:
            // y = (1 + tau lambda)/beta.
            let seed = (1.0 + tau * lambda_asymptotic(params)) / beta;
            (0.0, hi, seed)
        }
        Regime::Supercritical => {
            let mut lo = -0.5_f64;
            loop {
                if s_im_axis(lo)? > beta {
                    break;
                }
                if lo <= -37.5 {
                    return Err(Error::NoBracket { lo, hi: 0.0 });
                }
                lo = (lo * 2.0).max(-37.5);
            }
            // Seed by inverting the dominant growth s(y) ~ 2 sqrt(pi/2) e^{y^2/2}
            // for y << 0.
            let ratio = beta / (2.0 * SQRT_HALF_PI);
            let seed = if ratio > 1.0 {
                -(2.0 * ratio.ln()).sqrt()
            } else {
                -0.3
            };
            (lo, 0.0, seed)
        }
        Regime::Critical => unreachable!("handled above"),
    };

    let mut y = seed.clamp(lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo));
    let mut best_y = y;
    let mut best_f = f64::INFINITY;
    let mut iterations = 0usize;
    for _ in 0..200 {
        iterations += 1;
        let s = s_im_axis(y)?;
        let f = s - beta;
        if f.abs() < best_f {
            best_f = f.abs();
            best_y = y;
        }
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let step = f / s_prime(y, s);
        let mut next = y - step;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= f64::EPSILON * (1.0 + y.abs()) {
            break;
        }
        y = next;
    }

    let y = best_y;
    let residual = best_f;
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }

    // lambda = (beta y - 1)/tau. For tiny beta the product beta*y - 1
    // cancels catastrophically; there the inverse-power series is exact to
    // f64 and is used instead, with y rebuilt from the root link so the
    // pair stays exactly consistent.
    let (lambda_re, y_out) = if beta < SERIES_BETA_CUTOFF {
        let t2k2 = beta * beta;
        let k2 = params.k_mag * params.k_mag;
        // -tau k^2 (1 - (tau k)^2 + 4 (tau k)^4)
        let lam = -tau * k2 * (1.0 - t2k2 + 4.0 * t2k2 * t2k2);
        (lam, (1.0 + tau * lam) / beta)
    } else {
        ((beta * y - 1.0) / tau, y)
    };

    Ok(EigenResult {
        lambda: Complex64::new(lambda_re, 0.0),
        zeta_hat: Complex64::new(0.0, y_out),
        residual,
        iterations,
        regime,
    })
}

/// Evaluate the (unnormalized Gaussian-weighted) eigenfunction
/// phi(v) / (1 + tau lambda + i tau |k| v); its velocity integral is 1.
/// Only the subcritical root is an eigenvalue, so other regimes error.
pub fn eigenfunction(params: &ModeParams, eig: &EigenResult, v: f64) -> Result<Complex64> {
    if eig.regime != Regime::Subcritical {
        return Err(Error::NoEigenfunction);
    }
    if !v.is_finite() {
        return Err(Error::NonFinite {
            context: "eigenfunction velocity",
        });
    }
    let phi = (-v * v / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let den = 1.0 + params.tau * eig.lambda + Complex64::new(0.0, params.beta() * v);
    Ok(phi / den)
}
