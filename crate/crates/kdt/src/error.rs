use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type. Every public fallible operation returns one of
/// these; no NaN or infinity escapes through an `Ok`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input in {context}")]
    NonFinite { context: &'static str },

    #[error("scaled complementary error function overflows at z = {z} (deep lower half-plane)")]
    Overflow { z: Complex64 },

    #[error("branch is ambiguous on the real axis; select Upper or Lower explicitly")]
    RealAxisBranch,

    #[error(
        "asymptotic form rejected: arg(zeta) = {arg:.6} is within {margin} rad of the -pi/2 ray"
    )]
    StokesMargin { arg: f64, margin: f64 },

    #[error("asymptotic form requires |zeta| >= {min_abs}, got {abs:.6}")]
    AsymptoticDomain { abs: f64, min_abs: f64 },

    #[error("no sign change while scanning [{lo:.6e}, {hi:.6e}] for a root bracket")]
    NoBracket { lo: f64, hi: f64 },

    #[error("root solve stopped after {iterations} iterations with residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tau*|k| = {beta:.17} lies inside the critical band around sqrt(pi/2)")]
    CriticalBand { beta: f64 },

    #[error(
        "evaluation point within {distance:.3e} of a dispersion pole (threshold {threshold:.3e})"
    )]
    NearPole { distance: f64, threshold: f64 },

    #[error("quadrature tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    #[error("supercritical regime has no eigenfunction; the root is a resonance coordinate")]
    NoEigenfunction,

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("trajectory samples are not uniformly spaced (max deviation {max_dev:.3e})")]
    NonUniformSamples { max_dev: f64 },

    #[error("need at least {needed} trajectory samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("|rho| below the zero-crossing floor everywhere in the trajectory interior")]
    ZeroCrossing,

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
