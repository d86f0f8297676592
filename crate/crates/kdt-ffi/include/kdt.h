#ifndef KDT_H
#define KDT_H

/* Generated by cbindgen from kdt-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Branch selector for [`kdt_z_fn`].
 */
typedef enum {
  KDT_BRANCH_UPPER = 0,
  KDT_BRANCH_LOWER = 1,
  /**
   * Dispatch on sign(Im zeta); real-axis points are rejected.
   */
  KDT_BRANCH_PRINCIPAL_BY_HALF_PLANE = 2,
} KdtBranch;

/**
 * Position of tau*|k| relative to the critical product.
 */
typedef enum {
  KDT_REGIME_SUBCRITICAL = 0,
  KDT_REGIME_SUPERCRITICAL = 1,
  KDT_REGIME_CRITICAL = 2,
} KdtRegime;

/**
 * Outcome of a C-side call. `Ok` is zero; everything else names the
 * failure class of the underlying computation.
 */
typedef enum {
  KDT_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  KDT_STATUS_NULL_POINTER,
  /**
   * The computation panicked; the out-parameters are untouched.
   */
  KDT_STATUS_PANIC,
  KDT_STATUS_NON_FINITE,
  KDT_STATUS_OVERFLOW,
  KDT_STATUS_REAL_AXIS_BRANCH,
  KDT_STATUS_STOKES_MARGIN,
  KDT_STATUS_ASYMPTOTIC_DOMAIN,
  KDT_STATUS_NO_BRACKET,
  KDT_STATUS_NO_CONVERGENCE,
  KDT_STATUS_CRITICAL_BAND,
  KDT_STATUS_NEAR_POLE,
  KDT_STATUS_TOLERANCE_NOT_MET,
  KDT_STATUS_NO_EIGENFUNCTION,
  KDT_STATUS_INVALID_PARAM,
  KDT_STATUS_NON_UNIFORM_SAMPLES,
  KDT_STATUS_TOO_FEW_SAMPLES,
  KDT_STATUS_ZERO_CROSSING,
  KDT_STATUS_LAPACK,
  KDT_STATUS_CONFIG,
  KDT_STATUS_IO,
  KDT_STATUS_JSON,
} KdtStatus;

/**
 * Opaque reference-solver handle; create with [`kdt_oracle_new`], release
 * with [`kdt_oracle_free`].
 */
typedef struct KdtOracle KdtOracle;

/**
 * Complex number as two doubles; layout-compatible with C99 `double[2]`.
 */
typedef struct {
  double re;
  double im;
} KdtComplex;

/**
 * Mode eigenvalue solve result.
 */
typedef struct {
  KdtComplex lambda;
  /**
   * Root coordinate; purely imaginary.
   */
  KdtComplex zeta_hat;
  double residual;
  uint64_t iterations;
  KdtRegime regime;
} KdtEigenResult;

/**
 * Decay rate with its pole and continuum pieces.
 */
typedef struct {
  KdtComplex delta;
  /**
   * Pole-only route to the rate, `i |k| residue_num / residue_den`.
   */
  KdtComplex residue_route;
  KdtComplex integral_i1;
  KdtComplex integral_i2;
  double quad_err_estimate;
  KdtRegime regime;
} KdtDissipation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Evaluates one branch of the dispersion function.
 *
 * # Safety
 * `out` must be null or point to a writable `KdtComplex`.
 */
KdtStatus kdt_z_fn(KdtComplex zeta, KdtBranch branch, KdtComplex *out);

/**
 * Largest wavenumber magnitude carrying an isolated mode at relaxation
 * time `tau`.
 *
 * # Safety
 * `out` must be null or point to a writable `double`.
 */
KdtStatus kdt_critical_wavenumber(double tau, double *out);

/**
 * Solves the mode eigenvalue problem at `(tau, k_mag)` to residual
 * tolerance `tol`.
 *
 * # Safety
 * `out` must be null or point to a writable `KdtEigenResult`.
 */
KdtStatus kdt_solve_eigenvalue(double tau, double k_mag, double tol, KdtEigenResult *out);

/**
 * Decay rate at `(tau, k_mag)` and time `t > 0`, with quadrature stopping
 * threshold `quad_tol`.
 *
 * # Safety
 * `out` must be null or point to a writable `KdtDissipation`.
 */
KdtStatus kdt_dissipation_rate(double tau,
                               double k_mag,
                               double t,
                               double quad_tol,
                               KdtDissipation *out);

/**
 * Builds a reference-solver handle on a Gauss-Hermite grid of `grid_size`
 * nodes, seeded with amplitude `amplitude` at wavenumber `k_mag`.
 *
 * # Safety
 * `out` must be null or point to a writable `KdtOracle*`; on `Ok` it
 * receives an owned handle that must be released with [`kdt_oracle_free`].
 */
KdtStatus kdt_oracle_new(double tau,
                         double k_mag,
                         double amplitude,
                         size_t grid_size,
                         KdtOracle **out);

/**
 * Releases a handle from [`kdt_oracle_new`]. Null is a no-op.
 *
 * # Safety
 * `oracle` must be null or a handle returned by [`kdt_oracle_new`] that
 * has not been freed before.
 */
void kdt_oracle_free(KdtOracle *oracle);

/**
 * Evolved density at time `t >= 0`.
 *
 * # Safety
 * `oracle` must be a live handle from [`kdt_oracle_new`]; `out` must be
 * null or point to a writable `KdtComplex`.
 */
KdtStatus kdt_oracle_density(const KdtOracle *oracle, double t, KdtComplex *out);

/**
 * Number of velocity nodes behind a handle; 0 for null.
 *
 * # Safety
 * `oracle` must be null or a live handle from [`kdt_oracle_new`].
 */
size_t kdt_oracle_size(const KdtOracle *oracle);

/**
 * Static description of a status value; never null. Values outside the
 * enum map to "unknown status".
 */
const char *kdt_status_message(int status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KDT_H */
