#ifndef HYPEXT_H
#define HYPEXT_H

#pragma once

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum HypextStatus {
  HYPEXT_STATUS_OK = 0,
  HYPEXT_STATUS_NULL_POINTER = 1,
  HYPEXT_STATUS_DOMAIN = 2,
  HYPEXT_STATUS_PARABOLOID = 3,
  HYPEXT_STATUS_BUDGET_EXCEEDED = 4,
  HYPEXT_STATUS_BRANCH_CUT = 5,
  HYPEXT_STATUS_RESOLUTION = 6,
  HYPEXT_STATUS_DIVERGENT = 7,
  HYPEXT_STATUS_SINGULAR = 8,
  HYPEXT_STATUS_DEGENERATE_CHANGE = 9,
  HYPEXT_STATUS_NON_FINITE = 10,
  HYPEXT_STATUS_PARSE = 11,
  HYPEXT_STATUS_IO = 12,
  HYPEXT_STATUS_PANIC = 13,
} HypextStatus;

/**
 * Sampled complex function on a tensor grid.
 */
typedef struct HypextGrid HypextGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *hypext_last_error(void);

/**
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_critical_exponent(uintptr_t d, double *p_out);

/**
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_strichartz_q(double p, uintptr_t d, double *q_out);

/**
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_kappa(uintptr_t d, double *kappa_out);

/**
 * `k`-th moment of the Euler-Lagrange defect at exponent `p`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_moment(uintptr_t k,
                                double p,
                                uintptr_t d_plus,
                                uintptr_t d_minus,
                                double tol_abs,
                                double tol_rel,
                                double *re_out,
                                double *im_out,
                                double *abs_error_out);

/**
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_bessel_k0(double x, double *value_out);

/**
 * Closed form of the saddle kernel applied to the Gaussian tensor at `(eta, nu)`.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_kg_closed(double eta_1,
                                   double eta_2,
                                   double nu_1,
                                   double nu_2,
                                   double *value_out);

/**
 * Extension of the Gaussian at `(x, t)`; `x` holds `d_plus + d_minus` coordinates.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_gaussian_extension(uintptr_t d_plus,
                                            uintptr_t d_minus,
                                            const double *x,
                                            double t,
                                            double *re_out,
                                            double *im_out);

/**
 * The unit Gaussian on `[-half_width, half_width]^2` with `n` nodes per axis.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_grid_gaussian(double half_width,
                                       uintptr_t n,
                                       struct HypextGrid **grid_out);

/**
 * A 2-D grid on `[-half_width, half_width]^2` from `n * n` row-major samples.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_grid_from_samples(double half_width,
                                           uintptr_t n,
                                           const double *re,
                                           const double *im,
                                           struct HypextGrid **grid_out);

/**
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_grid_len(const struct HypextGrid *grid, uintptr_t *len_out);

/**
 * Copies the samples into caller buffers of length `len` (must equal the grid length).
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_grid_samples(const struct HypextGrid *grid,
                                      double *re,
                                      double *im,
                                      uintptr_t len);

/**
 * Releases a grid handle. Null is ignored.
 *
 * # Safety
 * `grid` must be null or a live handle from this library; it is invalid afterwards.
 */
void hypext_grid_free(struct HypextGrid *grid);

/**
 * `||Tf||_4^4 / ||f||_2^4` for the saddle with default slicing.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_lambda(const struct HypextGrid *grid, double *value_out);

/**
 * Gradient ascent from `grid`. The final profile is returned as a new handle.
 *
 * # Safety
 * Pointer arguments must be null or valid for the access described above.
 */
enum HypextStatus hypext_ascend(const struct HypextGrid *grid,
                                uintptr_t max_iters,
                                double step,
                                double tol,
                                double *lambda_out,
                                uintptr_t *iterations_out,
                                bool *improved_out,
                                struct HypextGrid **final_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPEXT_H */
