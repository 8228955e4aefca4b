/* C interface to the Zakharov-Kuznetsov 2-torus toolkit. */

#ifndef ZK_CAPI_H
#define ZK_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a C-API call.
 */
typedef enum ZkStatus {
  ZK_STATUS_OK = 0,
  ZK_STATUS_NULL_POINTER = 1,
  ZK_STATUS_INVALID_ARGUMENT = 2,
  ZK_STATUS_OVERFLOW = 3,
  ZK_STATUS_GRID_TOO_SMALL = 4,
  ZK_STATUS_SOLVE_FAILED = 5,
  ZK_STATUS_IO_ERROR = 6,
} ZkStatus;

/**
 * Opaque handle to a spectral field on the 2-torus.
 */
typedef struct ZkField ZkField;

/**
 * An integer resonance quadruple `(m, m1, n, n1)` with `R = 0`.
 */
typedef struct ZkQuadruple {
  int64_t m;
  int64_t m1;
  int64_t n;
  int64_t n1;
} ZkQuadruple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a NUL-terminated static string; never freed by the
 * caller.
 */
const char *zk_version(void);

/**
 * Dispersion symbol `phi(m, n) = m^3 + m n^2`, exact for `|m|, |n| <= 2e5`.
 *
 * # Safety
 * `out` must point to writable memory for one `int64_t`.
 */
enum ZkStatus zk_dispersion_symbol(int64_t m, int64_t n, int64_t *out);

/**
 * Resonance function `R(m, m1, n, n1)`, exact for inputs up to `2e5` in
 * magnitude (the value then fits `int64_t`).
 *
 * # Safety
 * `out` must point to writable memory for one `int64_t`.
 */
enum ZkStatus zk_resonance(int64_t m, int64_t m1, int64_t n, int64_t n1, int64_t *out);

/**
 * The curvature pair `R(m, 0, -1, 2)` and `R(m, 0, 1, -2)`; both equal
 * `-8 m`.
 *
 * # Safety
 * `out_a` and `out_b` must each point to writable memory for one
 * `int64_t`.
 */
enum ZkStatus zk_curvature(int64_t m, int64_t *out_a, int64_t *out_b);

/**
 * Enumerates all resonance zeros with `max(|m|,|m1|,|n|,|n1|) <= bound`
 * (sorted lexicographically). Two-call protocol: pass `quads = NULL` to
 * query the count via `out_len`, then call again with a buffer of that
 * capacity.
 *
 * # Safety
 * `out_len` must be a valid pointer; when `quads` is non-NULL it must
 * point to at least `capacity` writable `ZkQuadruple`s.
 */
enum ZkStatus zk_resonance_zeros(uint32_t bound,
                                 struct ZkQuadruple *quads,
                                 size_t capacity,
                                 size_t *out_len);

/**
 * Builds the approximate solution `u_{theta,m}(t)` on an `mx x my` grid
 * and returns an owned handle through `out`.
 *
 * # Safety
 * `out` must be a valid pointer; the returned handle must be released
 * with `zk_field_free`.
 */
enum ZkStatus zk_field_approx(double theta,
                              uint32_t m,
                              double s,
                              size_t mx,
                              size_t my,
                              double t,
                              struct ZkField **out);

/**
 * Releases a field handle. NULL is a no-op.
 *
 * # Safety
 * `field` must be a handle obtained from this library and not yet freed.
 */
void zk_field_free(struct ZkField *field);

/**
 * Applies the linear propagator `W(t)` in place.
 *
 * # Safety
 * `field` must be a live handle from this library.
 */
enum ZkStatus zk_field_propagate(struct ZkField *field, double t);

/**
 * Advances the field by one integrating-factor RK4 step of the full
 * nonlinear equation.
 *
 * # Safety
 * `field` must be a live handle from this library.
 */
enum ZkStatus zk_field_step(struct ZkField *field, double dt);

/**
 * Sobolev norm `||f||_{H^s}`.
 *
 * # Safety
 * `field` must be a live handle; `out` a valid pointer.
 */
enum ZkStatus zk_field_sobolev_norm(const struct ZkField *field, double s, double *out);

/**
 * Fourier coefficient at `(m1, m2)` (zero off the retained lattice).
 *
 * # Safety
 * `field` must be a live handle; `out_re`, `out_im` valid pointers.
 */
enum ZkStatus zk_field_coefficient(const struct ZkField *field,
                                   int64_t m1,
                                   int64_t m2,
                                   double *out_re,
                                   double *out_im);

/**
 * Integrates the field to `t_final` with step `dt`, recording observers
 * every `stride` steps, and writes the observer table (CSV) to `path`.
 * The handle itself is not modified.
 *
 * # Safety
 * `field` must be a live handle; `path` a NUL-terminated UTF-8 string.
 */
enum ZkStatus zk_field_solve_csv(const struct ZkField *field,
                                 double dt,
                                 double t_final,
                                 uint32_t stride,
                                 double s,
                                 const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZK_CAPI_H */
