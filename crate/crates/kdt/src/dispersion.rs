//! The dispersion function Z(zeta) = (1/sqrt(2 pi)) \int e^{-v^2/2}/(v - zeta) dv
//! and its two entire branch extensions.
//!
//! The principal definition only converges off the real axis; Z+ extends the
//! upper half-plane values to an entire function, Z- the lower ones. The two
//! differ by the jump 2 i sqrt(pi/2) e^{-zeta^2/2} across the real line.

use crate::error::{Error, Result};
use crate::faddeeva;
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// sqrt(pi/2), correctly rounded (runtime `(PI/2).sqrt()` is one ulp off).
pub const SQRT_HALF_PI: f64 = 1.2533141373155003;

/// Minimum |zeta| for the inverse-power asymptotic form.
pub const ASYMPTOTIC_MIN_ABS: f64 = 4.0;
/// Default angular clearance (radians) from the arg = -pi/2 ray required by
/// [`z_asymptotic`]; on that ray the exponentially large term the expansion
/// drops stops being negligible.
pub const DEFAULT_STOKES_MARGIN: f64 = 0.2;

/// Branch selector for [`z_fn`] and [`z_prime`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Entire extension of the upper-half-plane values.
    Upper,
    /// Entire extension of the lower-half-plane values.
    Lower,
    /// Dispatch on sign(Im zeta); rejected on the real axis, where the
    /// defining integral exists only as a principal value.
    PrincipalByHalfPlane,
}

/// A dispersion-function value tagged with the concrete branch it was
/// evaluated on (`PrincipalByHalfPlane` resolves to `Upper` or `Lower`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionValue {
    pub value: Complex64,
    pub branch: Branch,
}

fn resolve(branch: Branch, zeta: Complex64) -> Result<Branch> {
    match branch {
        Branch::Upper | Branch::Lower => Ok(branch),
        Branch::PrincipalByHalfPlane => {
            if zeta.im > 0.0 {
                Ok(Branch::Upper)
            } else if zeta.im < 0.0 {
                Ok(Branch::Lower)
            } else {
                Err(Error::RealAxisBranch)
            }
        }
    }
}

/// Upper branch: Z+(zeta) = i sqrt(pi/2) w(zeta/sqrt(2)).
fn z_upper(zeta: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(0.0, SQRT_HALF_PI) * faddeeva::w(zeta / SQRT_2)?)
}

/// Lower branch through the exact reflection Z-(zeta) = -Z+(-zeta), which
/// avoids the catastrophic cancellation of forming Z+ minus the jump term
/// where both are exponentially large.
fn z_lower(zeta: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(0.0, -SQRT_HALF_PI) * faddeeva::w(-zeta / SQRT_2)?)
}

/// Evaluate Z on the requested branch.
///
/// Relative accuracy ~1e-14 for |zeta| <= 10 sqrt(2). Errors:
/// [`Error::RealAxisBranch`] for the principal selector on Im zeta = 0,
/// [`Error::Overflow`] where the exponentially large part of the requested
/// branch exceeds f64 range, [`Error::NonFinite`] on bad input.
pub fn z_fn(zeta: Complex64, branch: Branch) -> Result<DispersionValue> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::NonFinite {
            context: "dispersion argument",
        });
    }
    let branch = resolve(branch, zeta)?;
    let value = match branch {
        Branch::Upper => z_upper(zeta)?,
        Branch::Lower => z_lower(zeta)?,
        Branch::PrincipalByHalfPlane => unreachable!("resolved above"),
    };
    Ok(DispersionValue { value, branch })
}

/// Z'(zeta) = -1 - zeta Z(zeta), exact given [`z_fn`] (the defining ODE).
pub fn z_prime(zeta: Complex64, branch: Branch) -> Result<DispersionValue> {
    let z = z_fn(zeta, branch)?;
    Ok(DispersionValue {
        value: -1.0 - zeta * z.value,
        branch: z.branch,
    })
}

/// Large-|zeta| form -1/zeta - 1/zeta^3 with the default Stokes margin.
pub fn z_asymptotic(zeta: Complex64) -> Result<Complex64> {
    z_asymptotic_with_margin(zeta, DEFAULT_STOKES_MARGIN)
}

/// Large-|zeta| form with a caller-chosen clearance from arg = -pi/2.
pub fn z_asymptotic_with_margin(zeta: Complex64, margin: f64) -> Result<Complex64> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::NonFinite {
            context: "asymptotic argument",
        });
    }
    let abs = zeta.norm();
    if abs < ASYMPTOTIC_MIN_ABS {
        return Err(Error::AsymptoticDomain {
            abs,
            min_abs: ASYMPTOTIC_MIN_ABS,
        });
    }
    let arg = zeta.arg();
    // Angular distance to the -pi/2 ray, wrapped into [0, pi].
    let mut d = (arg + std::f64::consts::FRAC_PI_2).abs();
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    if d < margin {
        return Err(Error::StokesMargin { arg, margin });
    }
    let inv = 1.0 / zeta;
    Ok(-inv - inv * inv * inv)
}
