#ifndef UVREG_H
#define UVREG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every call.
 */
typedef enum UvregStatus {
  UVREG_STATUS_OK = 0,
  UVREG_STATUS_NULL_POINTER = 1,
  UVREG_STATUS_DOMAIN = 2,
  UVREG_STATUS_NON_CONVERGENCE = 3,
  UVREG_STATUS_NO_SIGN_CHANGE = 4,
  UVREG_STATUS_POLE_NOT_BRACKETED = 5,
  UVREG_STATUS_DEGENERATE_POLE = 6,
  UVREG_STATUS_PANIC = 7,
} UvregStatus;

/**
 * Opaque solver state.
 */
typedef struct UvregHandle UvregHandle;

/**
 * Second-iteration quantities at the handle's coupling and width.
 */
typedef struct UvregIteration {
  double g;
  double lambda;
  double e0;
  double k0;
  double k0_asymptotic;
  double cutoff_residual;
  double a_re;
  double a_im;
  double b_re;
  double b_im;
  double e2_re;
  double e2_im;
  double e2_analytic;
  double e2_singular;
  double transition_half_rate;
  double mass0;
  double mass2;
} UvregIteration;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *uvreg_status_message(enum UvregStatus status);

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *uvreg_last_error_message(void);

/**
 * Create a handle; a non-positive `lambda` selects the optimal width for `g`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum UvregStatus uvreg_handle_new(double g, double lambda, struct UvregHandle **out);

/**
 * Release a handle; null is ignored.
 *
 * # Safety
 * `handle` must come from `uvreg_handle_new` and not be used afterwards.
 */
void uvreg_handle_free(struct UvregHandle *handle);

/**
 * Width stored in the handle.
 *
 * # Safety
 * `handle` and `out` must be null or valid.
 */
enum UvregStatus uvreg_handle_lambda(const struct UvregHandle *handle, double *out);

/**
 * Relative quadrature tolerance, in (0, 1).
 *
 * # Safety
 * `handle` must be null or valid.
 */
enum UvregStatus uvreg_handle_set_tolerance(struct UvregHandle *handle, double rel_tol);

/**
 * Keep (non-zero) or drop (zero) the fourth-order kernel in the second iteration.
 *
 * # Safety
 * `handle` must be null or valid.
 */
enum UvregStatus uvreg_handle_set_include_j(struct UvregHandle *handle, int32_t include);

/**
 * Optimal width at coupling `g`.
 *
 * # Safety
 * `out` must be null or valid.
 */
enum UvregStatus uvreg_lambda_opt(double g, double *out);

/**
 * Weak-coupling ground-state energy of the handle.
 *
 * # Safety
 * `handle` and `out` must be null or valid.
 */
enum UvregStatus uvreg_e0(const struct UvregHandle *handle, double *out);

/**
 * Self-consistent cutoff and the denominator at it.
 *
 * # Safety
 * `handle`, `k0` and `residual` must be null or valid; `residual` may be null.
 */
enum UvregStatus uvreg_cutoff(const struct UvregHandle *handle, double *k0, double *residual);

/**
 * Full second iteration.
 *
 * # Safety
 * `handle` and `out` must be null or valid.
 */
enum UvregStatus uvreg_iterate(const struct UvregHandle *handle, struct UvregIteration *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UVREG_H */
