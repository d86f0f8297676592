//! Time-dependent decay rate of a density Fourier mode.
//!
//! Inverting the mode's resolvent splits the density into a pole part (the
//! discrete relaxation mode) and a continuum integral along the real
//! frequency line. Both parts are kept separate in [`DissipationBreakdown`]
//! so callers can compare the exact rate with the single-pole approximation.
//! Below the critical wavenumber the pole contributes directly and the rate
//! is assembled from pole plus continuum; above it the pole has left the
//! contour and the rate is a pure ratio of continuum integrals, while the
//! analytically continued pole data is still reported for reference.

use crate::dispersion::{z_fn, Branch};
use crate::error::{Error, Result};
use crate::quadrature::{gl_panels, j_tails};
use crate::spectral::{solve_eigenvalue, EigenResult, ModeParams, Regime};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Eigenvalue residual requested when the rate assembly solves for the pole.
const EIG_TOL: f64 = 1e-12;

/// Hard cap on refinement-block doublings past the core interval.
const MAX_BLOCKS: usize = 40;

/// Node budget for the refinement blocks of one integral. Exceeding it means
/// the requested tolerance is unreachable at acceptable cost (in practice:
/// tail subtraction was disabled).
const BLOCK_NODE_BUDGET: usize = 1_500_000;

/// Which weight function enters the continuum integral: `W1` carries the
/// derivative of the dispersion function (numerator of the rate), `W2` the
/// dispersion function itself (density denominator).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WFunctionKind {
    W1,
    W2,
}

/// Controls for the oscillatory continuum quadrature.
///
/// The integrand decays only algebraically, so the scheme integrates a core
/// interval with Gauss-Legendre panels, adds the first five inverse-power
/// tail moments in closed form, and then refines with geometrically growing
/// blocks of the subtracted remainder until a block falls below `tol`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Width of the core interval; the core spans `[-x, x]` with
    /// `x = max(x_max / 2, 40 / beta)`. Must be at least 4.
    pub x_max: f64,
    /// Maximum phase advance (radians) of the oscillatory factor across one
    /// panel. Must lie in `(0, pi]`.
    pub panel_target: f64,
    /// Absolute stopping threshold for refinement blocks.
    pub tol: f64,
    /// Subtract the five-term inverse-power tail before refining. Disabling
    /// this leaves an `x^{-1}` tail whose blocks converge too slowly to meet
    /// any practical tolerance; the call then fails with the achieved error.
    pub tail_subtraction: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            x_max: 80.0,
            panel_target: PI / 5.0,
            tol: 1e-11,
            tail_subtraction: true,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.x_max.is_finite() || self.x_max < 4.0 {
            return Err(Error::InvalidParam {
                name: "x_max",
                value: self.x_max,
                constraint: "core interval half-width parameter must be finite and >= 4",
            });
        }
        if !self.panel_target.is_finite() || self.panel_target <= 0.0 || self.panel_target > PI {
            return Err(Error::InvalidParam {
                name: "panel_target",
                value: self.panel_target,
                constraint: "per-panel phase advance must lie in (0, pi]",
            });
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParam {
                name: "tol",
                value: self.tol,
                constraint: "block tolerance must be finite and positive",
            });
        }
        Ok(())
    }
}

/// Pole and continuum pieces of one rate evaluation.
///
/// `delta` is always reproducible from the other fields: rebuilding it with
/// [`DissipationBreakdown::delta_from_parts`] at the same parameters and
/// time yields the identical bits. Breakdowns produced by
/// [`dissipation_rate`] are never in the critical regime.
#[derive(Debug, Clone, Copy)]
pub struct DissipationBreakdown {
    /// The decay rate Delta(t).
    pub delta: Complex64,
    /// Pole contribution to the rate numerator, `exp(lambda t)`.
    pub residue_num: Complex64,
    /// Pole contribution to the density denominator,
    /// `(-i k / lambda) exp(lambda t)`.
    pub residue_den: Complex64,
    /// Continuum integral with the `W1` weight.
    pub integral_i1: Complex64,
    /// Continuum integral with the `W2` weight.
    pub integral_i2: Complex64,
    /// Larger of the two final refinement-block magnitudes.
    pub quad_err: f64,
    pub regime: Regime,
}

impl DissipationBreakdown {
    /// Reassembles the rate from the stored pole and continuum pieces. For a
    /// breakdown built by [`dissipation_rate`] with the same `params` and
    /// `t`, the result is bit-identical to `self.delta`.
    pub fn delta_from_parts(&self, params: &ModeParams, t: f64) -> Complex64 {
        let ik = Complex64::new(0.0, params.k_mag());
        match self.regime {
            Regime::Subcritical => {
                let weight = Complex64::new(0.0, (-t / params.tau()).exp() / (2.0 * PI));
                let num = self.residue_num + weight * self.integral_i1;
                let den = self.residue_den + weight * self.integral_i2;
                ik * num / den
            }
            Regime::Supercritical => ik * self.integral_i1 / self.integral_i2,
            Regime::Critical => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// The single-pole approximation of the rate, `i k num / den`. Equals
    /// `-lambda` up to roundoff in both regimes.
    pub fn residue_route(&self, params: &ModeParams) -> Complex64 {
        Complex64::new(0.0, params.k_mag()) * self.residue_num / self.residue_den
    }
}

/// Weight function of the continuum integrals on the requested branch:
/// `W1 = (zeta Z + 1) / (i beta - Z)` and `W2 = Z / (i beta - Z)`.
///
/// Fails with [`Error::NearPole`] when the denominator is closer to zero
/// than `1e-12 (1 + beta)`, which only happens within the critical band.
pub fn w_fn(
    kind: WFunctionKind,
    zeta: Complex64,
    params: &ModeParams,
    branch: Branch,
) -> Result<Complex64> {
    let z = z_fn(zeta, branch)?.value;
    let den = Complex64::new(0.0, params.beta()) - z;
    let threshold = 1e-12 * (1.0 + params.beta());
    if den.norm() < threshold {
        return Err(Error::NearPole {
            distance: den.norm(),
            threshold,
        });
    }
    Ok(match kind {
        WFunctionKind::W1 => (zeta * z + 1.0) / den,
        WFunctionKind::W2 => z / den,
    })
}

/// Pole contributions `(num, den)` at time `t`: `num = exp(lambda t)` and
/// `den = (-i k / lambda) exp(lambda t)`. The same expressions hold in both
/// noncritical regimes because the pole satisfies `Z'(zeta_hat) = tau
/// lambda` there.
pub fn residue_terms(
    params: &ModeParams,
    eig: &EigenResult,
    t: f64,
) -> Result<(Complex64, Complex64)> {
    if eig.regime == Regime::Critical {
        return Err(Error::CriticalBand {
            beta: params.beta(),
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParam {
            name: "t",
            value: t,
            constraint: "time must be finite and nonnegative",
        });
    }
    let growth = (eig.lambda * t).exp();
    let num = growth;
    let den = Complex64::new(0.0, -params.k_mag()) / eig.lambda * growth;
    Ok((num, den))
}

/// First five inverse-power tail coefficients of the weight function, from
/// expanding `Z = -1/x - 1/x^3 - 3/x^5 + O(x^-7)` inside `W_kind` with
/// `d = i beta`.
fn tail_coeffs(kind: WFunctionKind, beta: f64) -> [Complex64; 5] {
    let d = Complex64::new(0.0, beta);
    let d1 = d.inv();
    let d2 = d1 * d1;
    let d3 = d2 * d1;
    let d4 = d2 * d2;
    let d5 = d4 * d1;
    match kind {
        WFunctionKind::W1 => [
            Complex64::new(0.0, 0.0),
            -d1,
            d2,
            -(3.0 * d1 + d3),
            4.0 * d2 + d4,
        ],
        WFunctionKind::W2 => [
            -d1,
            d2,
            -(d1 + d3),
            2.0 * d2 + d4,
            -(3.0 * d1 + 3.0 * d3 + d5),
        ],
    }
}

/// Continuum integral `I = \int W_kind(x) e^{-i k t x} dx` over the real
/// line on the given branch's boundary values, returned with an absolute
/// error estimate (the final refinement-block magnitude).
///
/// Requires `t > 0` and a positive wavenumber. With tail subtraction
/// enabled the integrand is reduced to an `x^{-6}` remainder outside the
/// core, so a handful of blocks reaches `spec.tol`; without it the call
/// exhausts its node budget and reports the achieved error instead.
pub fn fourier_integral(
    kind: WFunctionKind,
    params: &ModeParams,
    t: f64,
    spec: &QuadratureSpec,
    branch: Branch,
) -> Result<(Complex64, f64)> {
    spec.validate()?;
    if params.k_mag() <= 0.0 {
        return Err(Error::InvalidParam {
            name: "k_mag",
            value: params.k_mag(),
            constraint: "continuum integrals need a positive wavenumber",
        });
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::InvalidParam {
            name: "t",
            value: t,
            constraint: "time must be finite and positive",
        });
    }
    let beta = params.beta();
    let a = params.k_mag() * t;
    let x0 = (0.5 * spec.x_max).max(40.0 / beta);
    let width = (spec.panel_target / a).min(1.0);
    let coeffs = spec.tail_subtraction.then(|| tail_coeffs(kind, beta));

    let w_at = |x: f64| w_fn(kind, Complex64::new(x, 0.0), params, branch);

    let mut core = |x: f64| Ok(w_at(x)? * Complex64::from_polar(1.0, -a * x));
    let mut total = gl_panels(&mut core, -x0, x0, width)?;

    if let Some(c) = &coeffs {
        let j = j_tails(a, x0);
        for n in 0..5 {
            total += c[n] * j[n];
        }
    }

    // Remainder beyond the core: the weight minus whatever tail was added
    // back in closed form.
    let g = |x: f64| -> Result<Complex64> {
        let mut v = w_at(x)?;
        if let Some(c) = &coeffs {
            let inv = 1.0 / x;
            let mut p = 1.0;
            let mut series = Complex64::new(0.0, 0.0);
            for cn in c {
                p *= inv;
                series += cn * p;
            }
            v -= series;
        }
        Ok(v)
    };

    let mut x = x0;
    let mut err = f64::INFINITY;
    let mut nodes_used = 0usize;
    for _ in 0..MAX_BLOCKS {
        let panels = ((x / width).ceil()).max(1.0) as usize;
        nodes_used += 2 * 16 * panels;
        if nodes_used > BLOCK_NODE_BUDGET {
            return Err(Error::ToleranceNotMet {
                requested: spec.tol,
                achieved: err,
            });
        }
        let mut block_f = |s: f64| {
            Ok(g(s)? * Complex64::from_polar(1.0, -a * s)
                + g(-s)? * Complex64::from_polar(1.0, a * s))
        };
        let block = gl_panels(&mut block_f, x, 2.0 * x, width)?;
        total += block;
        err = block.norm();
        if err < spec.tol {
            return Ok((total, err));
        }
        x *= 2.0;
    }
    Err(Error::ToleranceNotMet {
        requested: spec.tol,
        achieved: err,
    })
}

/// Full decay rate at time `t > 0`, with its pole and continuum pieces.
///
/// Subcritical modes combine pole and continuum,
/// `Delta = i k (num + w I1) / (den + w I2)` with
/// `w = i e^{-t/tau} / (2 pi)`; supercritical modes reduce to
/// `Delta = i k I1 / I2`. Fails with [`Error::CriticalBand`] when `beta`
/// sits inside the critical band, where the pole degenerates.
pub fn dissipation_rate(
    params: &ModeParams,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<DissipationBreakdown> {
    let eig = solve_eigenvalue(params, EIG_TOL)?;
    if eig.regime == Regime::Critical {
        return Err(Error::CriticalBand {
            beta: params.beta(),
        });
    }
    let (residue_num, residue_den) = residue_terms(params, &eig, t)?;
    // Both regimes integrate the boundary values from above.
    let (integral_i1, err1) = fourier_integral(WFunctionKind::W1, params, t, spec, Branch::Upper)?;
    let (integral_i2, err2) = fourier_integral(WFunctionKind::W2, params, t, spec, Branch::Upper)?;
    let mut out = DissipationBreakdown {
        delta: Complex64::new(0.0, 0.0),
        residue_num,
        residue_den,
        integral_i1,
        integral_i2,
        quad_err: err1.max(err2),
        regime: eig.regime,
    };
    out.delta = out.delta_from_parts(params, t);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::SQRT_HALF_PI;

    fn params(tau: f64, k: f64) -> ModeParams {
        ModeParams::new(tau, k, 3).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad_x = QuadratureSpec {
            x_max: 3.0,
            ..Default::default()
        };
        assert!(matches!(
            bad_x.validate(),
            Err(Error::InvalidParam { name: "x_max", .. })
        ));
        let bad_panel = QuadratureSpec {
            panel_target: 4.0,
            ..Default::default()
        };
        assert!(matches!(
            bad_panel.validate(),
            Err(Error::InvalidParam {
                name: "panel_target",
                ..
            })
        ));
        let bad_tol = QuadratureSpec {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            bad_tol.validate(),
            Err(Error::InvalidParam { name: "tol", .. })
        ));
    }

    #[test]
    fn weight_function_rejects_critical_pole() {
        // At beta exactly critical the denominator vanishes at the origin.
        let p = params(1.0, SQRT_HALF_PI);
        let err = w_fn(
            WFunctionKind::W2,
            Complex64::new(0.0, 0.0),
            &p,
            Branch::Upper,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NearPole { .. }));
    }

    #[test]
    fn frozen_continuum_integrals_subcritical() {
        // Oracle values from 40-digit oscillatory quadrature, tau = 0.3,
        // k = 1 (beta = 0.3).
        let p = params(0.3, 1.0);
        let spec = QuadratureSpec {
            tol: 1e-13,
            ..Default::default()
        };
        let cases = [
            (
                0.3,
                Complex64::new(0.0, 5.308363020197869),
                Complex64::new(-1.1477232635224548, 0.0),
            ),
            (
                1.0,
                Complex64::new(0.0, 1.676531520781387),
                Complex64::new(-0.24585648839299534, 0.0),
            ),
        ];
        for (t, want_i1, want_i2) in cases {
            let (i1, e1) =
                fourier_integral(WFunctionKind::W1, &p, t, &spec, Branch::Upper).unwrap();
            let (i2, e2) =
                fourier_integral(WFunctionKind::W2, &p, t, &spec, Branch::Upper).unwrap();
            assert!(e1 < 1e-13 && e2 < 1e-13);
            assert!((i1 - want_i1).norm() < 5e-12, "I1(t={t}) = {i1}");
            assert!((i2 - want_i2).norm() < 5e-12, "I2(t={t}) = {i2}");
            // Parity of the weights makes I1 imaginary and I2 real.
            assert!(i1.re.abs() < 1e-12 * i1.norm());
            assert!(i2.im.abs() < 1e-12 * i2.norm());
        }
    }

    #[test]
    fn frozen_rate_subcritical() {
        let p = params(0.3, 1.0);
        let spec = QuadratureSpec {
            tol: 1e-13,
            ..Default::default()
        };
        let cases = [(0.3, 0.1887803041845078), (1.0, 0.2759603977680122)];
        for (t, want) in cases {
            let b = dissipation_rate(&p, t, &spec).unwrap();
            assert_eq!(b.regime, Regime::Subcritical);
            assert!(
                (b.delta.re - want).abs() < 1e-11 * want.abs(),
                "delta({t}) = {}",
                b.delta
            );
            assert!(b.delta.im.abs() < 1e-11 * want.abs());
        }
    }

    #[test]
    fn frozen_rate_supercritical() {
        // tau = 1, k = 2 (beta = 2), t = 2.
        let p = params(1.0, 2.0);
        let spec = QuadratureSpec {
            tol: 1e-13,
            ..Default::default()
        };
        let b = dissipation_rate(&p, 2.0, &spec).unwrap();
        assert_eq!(b.regime, Regime::Supercritical);
        let want_i1 = Complex64::new(0.0, -0.7910122730247525);
        let want_i2 = Complex64::new(0.7775713581343678, 0.0);
        let want_delta = 2.034571527744112;
        assert!((b.integral_i1 - want_i1).norm() < 5e-12);
        assert!((b.integral_i2 - want_i2).norm() < 5e-12);
        assert!((b.delta.re - want_delta).abs() < 1e-10 * want_delta);
        assert!(b.delta.im.abs() < 1e-10 * want_delta);
    }

    #[test]
    fn residue_route_is_negative_lambda() {
        for (tau, k) in [(0.2, 1.0), (1.0, 2.0)] {
            let p = params(tau, k);
            let eig = solve_eigenvalue(&p, 1e-12).unwrap();
            let (num, den) = residue_terms(&p, &eig, 0.7).unwrap();
            let route = Complex64::new(0.0, k) * num / den;
            assert!((route + eig.lambda).norm() < 1e-14 * eig.lambda.norm());
        }
    }

    #[test]
    fn rebuild_reproduces_delta_bitwise() {
        let spec = QuadratureSpec::default();
        for (tau, k, t) in [(0.3, 1.0, 0.5), (1.0, 2.0, 1.0)] {
            let p = params(tau, k);
            let b = dissipation_rate(&p, t, &spec).unwrap();
            let rebuilt = b.delta_from_parts(&p, t);
            assert_eq!(b.delta.re.to_bits(), rebuilt.re.to_bits());
            assert_eq!(b.delta.im.to_bits(), rebuilt.im.to_bits());
        }
    }

    #[test]
    fn critical_band_is_rejected() {
        let p = params(1.0, SQRT_HALF_PI);
        let err = dissipation_rate(&p, 1.0, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, Error::CriticalBand { .. }));
    }

    #[test]
    fn invalid_time_is_rejected() {
        let p = params(0.3, 1.0);
        let err = fourier_integral(
            WFunctionKind::W2,
            &p,
            0.0,
            &QuadratureSpec::default(),
            Branch::Upper,
        );
        assert!(matches!(err, Err(Error::InvalidParam { name: "t", .. })));
    }

    #[test]
    fn disabling_tail_subtraction_fails_tolerance() {
        let p = params(0.3, 1.0);
        let spec = QuadratureSpec {
            tail_subtraction: false,
            tol: 1e-12,
            ..Default::default()
        };
        let err = fourier_integral(WFunctionKind::W2, &p, 1.0, &spec, Branch::Upper).unwrap_err();
        match err {
            Error::ToleranceNotMet { achieved, .. } => assert!(achieved > 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
