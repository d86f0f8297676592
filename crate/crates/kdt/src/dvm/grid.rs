//! Velocity grids for the reference solver.
//!
//! Both schemes produce plain `\int f dv` quadrature weights, so the
//! density of a distribution sampled at the nodes is the weighted sum of
//! its values. The Gauss-Hermite grid is exact for Maxwellian-weighted
//! polynomial moments; the uniform grid trades that for even coverage of
//! the velocity interval, which resolves continuous-spectrum phase mixing
//! at long times better than clustered nodes do.

use crate::dvm::lapack;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Normalized Maxwellian, unit density and unit temperature.
pub fn maxwellian(v: f64) -> f64 {
    (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScheme {
    GaussHermite,
    UniformTruncated,
}

/// Velocity abscissae with `\int . dv` quadrature weights.
///
/// Invariants held by both constructors: nodes strictly increasing,
/// weights positive, and the Maxwellian moments `sum w phi = 1`,
/// `sum w v phi = 0` reproduced to 1e-12.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: GridScheme,
}

impl VelocityGrid {
    /// Gauss-Hermite grid matched to the unit-temperature Maxwellian.
    ///
    /// Nodes are the eigenvalues of the weight's Jacobi matrix (zero
    /// diagonal, off-diagonal sqrt(j)); the weight at a node is one over
    /// the summed squares of the orthonormal weight-functions there. That
    /// evaluation stays within f64 range for any practical `n`, unlike the
    /// textbook factorial formulas.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if !(4..=4096).contains(&n) {
            return Err(Error::InvalidParam {
                name: "n",
                value: n as f64,
                constraint: "node count must lie in [4, 4096]",
            });
        }
        let off: Vec<f64> = (1..n).map(|j| (j as f64).sqrt()).collect();
        let nodes = lapack::tridiagonal_eigenvalues(vec![0.0; n], off)?;
        let weights = nodes
            .iter()
            .map(|&x| {
                // Orthonormal functions of the Maxwellian weight:
                // psi_0 = phi^(1/2), x psi_j = sqrt(j+1) psi_{j+1}
                //                            + sqrt(j) psi_{j-1}.
                let mut prev = 0.0f64;
                let mut cur = (-0.25 * x * x).exp() / (2.0 * PI).powf(0.25);
                let mut sum = cur * cur;
                for j in 0..n - 1 {
                    let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
                    prev = cur;
                    cur = next;
                    sum += cur * cur;
                }
                1.0 / sum
            })
            .collect();
        Ok(VelocityGrid {
            nodes,
            weights,
            scheme: GridScheme::GaussHermite,
        })
    }

    /// Midpoint grid on `[-v_max, v_max]`. A cutoff of 8 keeps the
    /// discarded Maxwellian tail below 1e-14.
    pub fn uniform_truncated(n: usize, v_max: f64) -> Result<Self> {
        if !(4..=65536).contains(&n) {
            return Err(Error::InvalidParam {
                name: "n",
                value: n as f64,
                constraint: "node count must lie in [4, 65536]",
            });
        }
        if !v_max.is_finite() || v_max < 4.0 {
            return Err(Error::InvalidParam {
                name: "v_max",
                value: v_max,
                constraint: "velocity cutoff must be finite and >= 4",
            });
        }
        let dv = 2.0 * v_max / n as f64;
        let nodes = (0..n).map(|a| -v_max + (a as f64 + 0.5) * dv).collect();
        Ok(VelocityGrid {
            nodes,
            weights: vec![dv; n],
            scheme: GridScheme::UniformTruncated,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest node magnitude; bounds the advection frequency `k v`.
    pub fn v_max(&self) -> f64 {
        self.nodes.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Deviations of the discrete Maxwellian moments from their continuum
    /// values: `(sum w phi - 1, sum w v phi, sum w v^2 phi - 1)`.
    pub fn moment_defects(&self) -> (f64, f64, f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (&v, &w) in self.nodes.iter().zip(&self.weights) {
            let p = w * maxwellian(v);
            m0 += p;
            m1 += p * v;
            m2 += p * v * v;
        }
        (m0 - 1.0, m1, m2 - 1.0)
    }
}
