#ifndef QHARNESS_H
#define QHARNESS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum {
  QH_STATUS_OK = 0,
  QH_STATUS_NULL_POINTER = 1,
  QH_STATUS_DOMAIN = 2,
  QH_STATUS_UNSUPPORTED = 3,
  QH_STATUS_NUMERICAL = 4,
  QH_STATUS_INCONSISTENT = 5,
  QH_STATUS_BUFFER_TOO_SMALL = 6,
  QH_STATUS_PANIC = 7,
} QhStatus;

/**
 * A discrete transition law: nodes in increasing order with their weights.
 */
typedef struct QhKernel QhKernel;

/**
 * Process parameters `(theta, tau, q)`.
 */
typedef struct {
  double theta;
  double tau;
  double q;
} QhParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on the calling thread, or an empty string.
 * The pointer stays valid until the next failing call on that thread.
 */
const char *qh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qh_version(void);

/**
 * Builds the transition law from `x` at time `s` to time `t` with `nodes`
 * quadrature points (two points at `q = -1`).
 *
 * # Safety
 * `params` must point to a valid `QhParams` and `out` to writable storage
 * for one pointer.
 */
QhStatus qh_kernel_new(const QhParams *params,
                       double x,
                       double s,
                       double t,
                       size_t nodes,
                       QhKernel **out);

/**
 * Law of `X_t` started from `X_0 = 0`.
 *
 * # Safety
 * As for [`qh_kernel_new`].
 */
QhStatus qh_marginal_new(const QhParams *params, double t, size_t nodes, QhKernel **out);

/**
 * Number of atoms of the kernel; 0 for a null handle.
 *
 * # Safety
 * `kernel` must be null or a live handle.
 */
size_t qh_kernel_len(const QhKernel *kernel);

/**
 * Copies the nodes into `buf`, which must hold at least
 * `qh_kernel_len(kernel)` values.
 *
 * # Safety
 * `kernel` must be a live handle and `buf` valid for `len` writes.
 */
QhStatus qh_kernel_copy_nodes(const QhKernel *kernel, double *buf, size_t len);

/**
 * Copies the weights into `buf`.
 *
 * # Safety
 * As for [`qh_kernel_copy_nodes`].
 */
QhStatus qh_kernel_copy_weights(const QhKernel *kernel, double *buf, size_t len);

/**
 * `k`-th moment of the kernel.
 *
 * # Safety
 * `kernel` must be a live handle and `out` writable.
 */
QhStatus qh_kernel_moment(const QhKernel *kernel, uint32_t k, double *out);

/**
 * Releases a kernel; null is ignored.
 *
 * # Safety
 * `kernel` must be null or a handle not yet freed.
 */
void qh_kernel_free(QhKernel *kernel);

/**
 * Samples `paths` trajectories on the increasing `grid` into `out`,
 * row-major with one row of `grid_len` values per path. Output depends only
 * on `seed` and the path index.
 *
 * # Safety
 * `params` must be valid, `grid` readable for `grid_len` values and `out`
 * writable for `out_len` values.
 */
QhStatus qh_sample_paths(const QhParams *params,
                         const double *grid,
                         size_t grid_len,
                         uint64_t seed,
                         size_t paths,
                         size_t nodes,
                         double *out,
                         size_t out_len);

/**
 * Density of the free (`q = 0`) transition at `y`.
 *
 * # Safety
 * `out` must be writable.
 */
QhStatus qh_free_density(double theta,
                         double tau,
                         double x,
                         double s,
                         double t,
                         double y,
                         double *out);

/**
 * q-Brownian transition density at `y`, product truncated after
 * `product_terms` factors.
 *
 * # Safety
 * `out` must be writable.
 */
QhStatus qh_qbrownian_density(double q,
                              double x,
                              double s,
                              double t,
                              double y,
                              size_t product_terms,
                              double *out);

/**
 * `E exp(i u X_t)` for the `q = 1` law selected by `(theta, tau)`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
QhStatus qh_classical_char_fn(double theta, double tau, double t, double u, double *re, double *im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHARNESS_H */
