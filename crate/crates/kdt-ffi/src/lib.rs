//! C interface over the core crate.
//!
//! Every fallible entry point returns a [`KdtStatus`] and writes its result
//! through an out-pointer; pointers are null-checked and panics are caught
//! at the boundary, so no Rust unwinding ever crosses into C. The reference
//! solver is exposed through the opaque [`KdtOracle`] handle.

use std::os::raw::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kdt::dispersion::{z_fn, Branch};
use kdt::dissipation::{dissipation_rate, QuadratureSpec};
use kdt::dvm::{InitialCondition, Propagator, VelocityGrid};
use kdt::spectral::{critical_wavenumber, solve_eigenvalue, ModeParams, Regime};
use kdt::Error;
use num_complex::Complex64;

/// Outcome of a C-side call. `Ok` is zero; everything else names the
/// failure class of the underlying computation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer,
    /// The computation panicked; the out-parameters are untouched.
    Panic,
    NonFinite,
    Overflow,
    RealAxisBranch,
    StokesMargin,
    AsymptoticDomain,
    NoBracket,
    NoConvergence,
    CriticalBand,
    NearPole,
    ToleranceNotMet,
    NoEigenfunction,
    InvalidParam,
    NonUniformSamples,
    TooFewSamples,
    ZeroCrossing,
    Lapack,
    Config,
    Io,
    Json,
}

impl From<&Error> for KdtStatus {
    fn from(err: &Error) -> KdtStatus {
        match err {
            Error::NonFinite { .. } => KdtStatus::NonFinite,
            Error::Overflow { .. } => KdtStatus::Overflow,
            Error::RealAxisBranch => KdtStatus::RealAxisBranch,
            Error::StokesMargin { .. } => KdtStatus::StokesMargin,
            Error::AsymptoticDomain { .. } => KdtStatus::AsymptoticDomain,
            Error::NoBracket { .. } => KdtStatus::NoBracket,
            Error::NoConvergence { .. } => KdtStatus::NoConvergence,
            Error::CriticalBand { .. } => KdtStatus::CriticalBand,
            Error::NearPole { .. } => KdtStatus::NearPole,
            Error::ToleranceNotMet { .. } => KdtStatus::ToleranceNotMet,
            Error::NoEigenfunction => KdtStatus::NoEigenfunction,
            Error::InvalidParam { .. } => KdtStatus::InvalidParam,
            Error::NonUniformSamples { .. } => KdtStatus::NonUniformSamples,
            Error::TooFewSamples { .. } => KdtStatus::TooFewSamples,
            Error::ZeroCrossing => KdtStatus::ZeroCrossing,
            Error::Lapack { .. } => KdtStatus::Lapack,
            Error::Config(_) => KdtStatus::Config,
            Error::Io(_) => KdtStatus::Io,
            Error::Json(_) => KdtStatus::Json,
        }
    }
}

/// Complex number as two doubles; layout-compatible with C99 `double[2]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for KdtComplex {
    fn from(z: Complex64) -> KdtComplex {
        KdtComplex { re: z.re, im: z.im }
    }
}

impl From<KdtComplex> for Complex64 {
    fn from(z: KdtComplex) -> Complex64 {
        Complex64::new(z.re, z.im)
    }
}

/// Branch selector for [`kdt_z_fn`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdtBranch {
    Upper = 0,
    Lower = 1,
    /// Dispatch on sign(Im zeta); real-axis points are rejected.
    PrincipalByHalfPlane = 2,
}

impl From<KdtBranch> for Branch {
    fn from(b: KdtBranch) -> Branch {
        match b {
            KdtBranch::Upper => Branch::Upper,
            KdtBranch::Lower => Branch::Lower,
            KdtBranch::PrincipalByHalfPlane => Branch::PrincipalByHalfPlane,
        }
    }
}

/// Position of tau*|k| relative to the critical product.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdtRegime {
    Subcritical = 0,
    Supercritical = 1,
    Critical = 2,
}

impl From<Regime> for KdtRegime {
    fn from(r: Regime) -> KdtRegime {
        match r {
            Regime::Subcritical => KdtRegime::Subcritical,
            Regime::Supercritical => KdtRegime::Supercritical,
            Regime::Critical => KdtRegime::Critical,
        }
    }
}

/// Mode eigenvalue solve result.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KdtEigenResult {
    pub lambda: KdtComplex,
    /// Root coordinate; purely imaginary.
    pub zeta_hat: KdtComplex,
    pub residual: f64,
    pub iterations: u64,
    pub regime: KdtRegime,
}

/// Decay rate with its pole and continuum pieces.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KdtDissipation {
    pub delta: KdtComplex,
    /// Pole-only route to the rate, `i |k| residue_num / residue_den`.
    pub residue_route: KdtComplex,
    pub integral_i1: KdtComplex,
    pub integral_i2: KdtComplex,
    pub quad_err_estimate: f64,
    pub regime: KdtRegime,
}

/// Opaque reference-solver handle; create with [`kdt_oracle_new`], release
/// with [`kdt_oracle_free`].
pub struct KdtOracle {
    propagator: Propagator,
}

fn guarded<F: FnOnce() -> KdtStatus>(f: F) -> KdtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(KdtStatus::Panic)
}

/// Evaluates one branch of the dispersion function.
///
/// # Safety
/// `out` must be null or point to a writable `KdtComplex`.
#[no_mangle]
pub unsafe extern "C" fn kdt_z_fn(
    zeta: KdtComplex,
    branch: KdtBranch,
    out: *mut KdtComplex,
) -> KdtStatus {
    guarded(|| {
        if out.is_null() {
            return KdtStatus::NullPointer;
        }
        match z_fn(zeta.into(), branch.into()) {
            Ok(v) => {
                out.write(v.value.into());
                KdtStatus::Ok
            }
            Err(err) => (&err).into(),
        }
    })
}

/// Largest wavenumber magnitude carrying an isolated mode at relaxation
/// time `tau`.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn kdt_critical_wavenumber(tau: f64, out: *mut f64) -> KdtStatus {
    guarded(|| {
        if out.is_null() {
            return KdtStatus::NullPointer;
        }
        match critical_wavenumber(tau) {
            Ok(kc) => {
                out.write(kc);
                KdtStatus::Ok
            }
            Err(err) => (&err).into(),
        }
    })
}

/// Solves the mode eigenvalue problem at `(tau, k_mag)` to residual
/// tolerance `tol`.
///
/// # Safety
/// `out` must be null or point to a writable `KdtEigenResult`.
#[no_mangle]
pub unsafe extern "C" fn kdt_solve_eigenvalue(
    tau: f64,
    k_mag: f64,
    tol: f64,
    out: *mut KdtEigenResult,
) -> KdtStatus {
    guarded(|| {
        if out.is_null() {
            return KdtStatus::NullPointer;
        }
        let result = ModeParams::new(tau, k_mag, 3).and_then(|p| solve_eigenvalue(&p, tol));
        match result {
            Ok(eig) => {
                out.write(KdtEigenResult {
                    lambda: eig.lambda.into(),
                    zeta_hat: eig.zeta_hat.into(),
                    residual: eig.residual,
                    iterations: eig.iterations as u64,
                    regime: eig.regime.into(),
                });
                KdtStatus::Ok
            }
            Err(err) => (&err).into(),
        }
    })
}

/// Decay rate at `(tau, k_mag)` and time `t > 0`, with quadrature stopping
/// threshold `quad_tol`.
///
/// # Safety
/// `out` must be null or point to a writable `KdtDissipation`.
#[no_mangle]
pub unsafe extern "C" fn kdt_dissipation_rate(
    tau: f64,
    k_mag: f64,
    t: f64,
    quad_tol: f64,
    out: *mut KdtDissipation,
) -> KdtStatus {
    guarded(|| {
        if out.is_null() {
            return KdtStatus::NullPointer;
        }
        let spec = QuadratureSpec {
            tol: quad_tol,
            ..QuadratureSpec::default()
        };
        let result = ModeParams::new(tau, k_mag, 3)
            .and_then(|p| dissipation_rate(&p, t, &spec).map(|b| (b, b.residue_route(&p))));
        match result {
            Ok((b, route)) => {
                out.write(KdtDissipation {
                    delta: b.delta.into(),
                    residue_route: route.into(),
                    integral_i1: b.integral_i1.into(),
                    integral_i2: b.integral_i2.into(),
                    quad_err_estimate: b.quad_err,
                    regime: b.regime.into(),
                });
                KdtStatus::Ok
            }
            Err(err) => (&err).into(),
        }
    })
}

/// Builds a reference-solver handle on a Gauss-Hermite grid of `grid_size`
/// nodes, seeded with amplitude `amplitude` at wavenumber `k_mag`.
///
/// # Safety
/// `out` must be null or point to a writable `KdtOracle*`; on `Ok` it
/// receives an owned handle that must be released with [`kdt_oracle_free`].
#[no_mangle]
pub unsafe extern "C" fn kdt_oracle_new(
    tau: f64,
    k_mag: f64,
    amplitude: f64,
    grid_size: usize,
    out: *mut *mut KdtOracle,
) -> KdtStatus {
    guarded(|| {
        if out.is_null() {
            return KdtStatus::NullPointer;
        }
        let built = ModeParams::new(tau, k_mag, 3).and_then(|params| {
            let grid = VelocityGrid::gauss_hermite(grid_size)?;
            let ic = InitialCondition::new(amplitude, k_mag)?;
            Propagator::new(&grid, &params, &ic)
        });
        match built {
            Ok(propagator) => {
                out.write(Box::into_raw(Box::new(KdtOracle { propagator })));
                KdtStatus::Ok
            }
            Err(err) => (&err).into(),
        }
    })
}

/// Releases a handle from [`kdt_oracle_new`]. Null is a no-op.
///
/// # Safety
/// `oracle` must be null or a handle returned by [`kdt_oracle_new`] that
/// has not been freed before.
#[no_mangle]
pub unsafe extern "C" fn kdt_oracle_free(oracle: *mut KdtOracle) {
    if oracle.is_null() {
        return;
    }
    // SAFETY: ownership was transferred out of kdt_oracle_new.
    drop(Box::from_raw(oracle));
}

/// Evolved density at time `t >= 0`.
///
/// # Safety
/// `oracle` must be a live handle from [`kdt_oracle_new`]; `out` must be
/// null or point to a writable `KdtComplex`.
#[no_mangle]
pub unsafe extern "C" fn kdt_oracle_density(
    oracle: *const KdtOracle,
    t: f64,
    out: *mut KdtComplex,
) -> KdtStatus {
    guarded(|| {
        if oracle.is_null() || out.is_null() {
            return KdtStatus::NullPointer;
        }
        if !t.is_finite() || t < 0.0 {
            return KdtStatus::InvalidParam;
        }
        let rho = (*oracle).propagator.density_at(t);
        out.write(rho.into());
        KdtStatus::Ok
    })
}

/// Number of velocity nodes behind a handle; 0 for null.
///
/// # Safety
/// `oracle` must be null or a live handle from [`kdt_oracle_new`].
#[no_mangle]
pub unsafe extern "C" fn kdt_oracle_size(oracle: *const KdtOracle) -> usize {
    if oracle.is_null() {
        return 0;
    }
    (*oracle).propagator.grid().len()
}

/// Static description of a status value; never null. Values outside the
/// enum map to "unknown status".
#[no_mangle]
pub extern "C" fn kdt_status_message(status: c_int) -> *const c_char {
    // Byte strings, not c"" literals: the header generator parses this file
    // with a frontend that predates them.
    #![allow(clippy::manual_c_str_literals)]
    const MESSAGES: &[(KdtStatus, &[u8])] = &[
        (KdtStatus::Ok, b"ok\0"),
        (KdtStatus::NullPointer, b"null pointer argument\0"),
        (
            KdtStatus::Panic,
            b"internal panic caught at the C boundary\0",
        ),
        (KdtStatus::NonFinite, b"non-finite input\0"),
        (
            KdtStatus::Overflow,
            b"result overflows in the deep lower half-plane\0",
        ),
        (
            KdtStatus::RealAxisBranch,
            b"branch is ambiguous on the real axis\0",
        ),
        (
            KdtStatus::StokesMargin,
            b"asymptotic form rejected near the anti-Stokes ray\0",
        ),
        (
            KdtStatus::AsymptoticDomain,
            b"asymptotic form requires a larger argument\0",
        ),
        (
            KdtStatus::NoBracket,
            b"no sign change found while bracketing\0",
        ),
        (
            KdtStatus::NoConvergence,
            b"iteration stopped before reaching tolerance\0",
        ),
        (
            KdtStatus::CriticalBand,
            b"tau*|k| lies inside the critical band\0",
        ),
        (
            KdtStatus::NearPole,
            b"evaluation point too close to a dispersion pole\0",
        ),
        (
            KdtStatus::ToleranceNotMet,
            b"quadrature tolerance not met\0",
        ),
        (
            KdtStatus::NoEigenfunction,
            b"supercritical regime has no eigenfunction\0",
        ),
        (KdtStatus::InvalidParam, b"invalid parameter\0"),
        (
            KdtStatus::NonUniformSamples,
            b"trajectory samples are not uniformly spaced\0",
        ),
        (KdtStatus::TooFewSamples, b"too few trajectory samples\0"),
        (
            KdtStatus::ZeroCrossing,
            b"density below the zero-crossing floor\0",
        ),
        (KdtStatus::Lapack, b"LAPACK routine failed\0"),
        (KdtStatus::Config, b"configuration error\0"),
        (KdtStatus::Io, b"I/O error\0"),
        (KdtStatus::Json, b"JSON error\0"),
    ];
    for (s, msg) in MESSAGES {
        if *s as c_int == status {
            return msg.as_ptr() as *const c_char;
        }
    }
    b"unknown status\0".as_ptr() as *const c_char
}
