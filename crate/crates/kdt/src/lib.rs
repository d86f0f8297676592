//! Kinetic dissipation toolkit.
//!
//! Evaluates the plasma dispersion function on both branches, locates the
//! discrete relaxation mode of a collisional kinetic density mode, computes
//! the exact time-dependent decay rate with its pole/continuum breakdown,
//! and cross-checks everything against a discrete-velocity reference solver.

pub mod cli;
pub mod dispersion;
pub mod dissipation;
pub mod dvm;
pub mod error;
pub mod faddeeva;
pub(crate) mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
