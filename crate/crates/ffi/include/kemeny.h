#ifndef KEMENY_H
#define KEMENY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum KemenyStatus {
  KEMENY_STATUS_OK = 0,
  KEMENY_STATUS_NULL_POINTER = 1,
  KEMENY_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed transition matrix: wrong size, negative or non-finite
   * entries, rows not summing to one, fewer than three states.
   */
  KEMENY_STATUS_INVALID_CHAIN = 3,
  KEMENY_STATUS_NOT_IRREDUCIBLE = 4,
  KEMENY_STATUS_NOT_APERIODIC = 5,
  KEMENY_STATUS_NOT_REVERSIBLE = 6,
  KEMENY_STATUS_SELF_LOOP = 7,
  KEMENY_STATUS_NUMERICAL_FAILURE = 8,
  KEMENY_STATUS_BUFFER_TOO_SMALL = 9,
  KEMENY_STATUS_PANIC = 10,
} KemenyStatus;

/**
 * Opaque analysis of one chain.
 */
typedef struct KemenyAnalysis KemenyAnalysis;

/**
 * The four routes to Kemeny's constant. `per_state_min` and
 * `per_state_max` bracket the per-state values.
 */
typedef struct KemenyConstants {
  double per_state_min;
  double per_state_max;
  double commute;
  double geometric;
  double spectral;
  /**
   * Spread of the per-state values.
   */
  double spread;
  /**
   * Largest disagreement between routes.
   */
  double agreement;
} KemenyConstants;

typedef struct KemenyGeometry {
  double r_squared;
  double r;
  /**
   * Squared distance between circumcenter and Lemoine point.
   */
  double center_distance_squared;
  double center_distance;
  bool circumcenter_inside;
} KemenyGeometry;

typedef struct KemenyEstimate {
  double mean;
  double stderr;
  uint64_t samples;
} KemenyEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Analyses the chain with row-major transition matrix `p` (`n * n`
 * doubles) using the default tolerances. On success `*out` receives a
 * handle to release with [`kemeny_analysis_free`].
 *
 * # Safety
 * `p` must point to `n * n` readable doubles and `out` must be writable.
 */
enum KemenyStatus kemeny_analysis_new(size_t n, const double *p, struct KemenyAnalysis **out);

/**
 * Like [`kemeny_analysis_new`] with a custom cross-route tolerance.
 *
 * # Safety
 * As for [`kemeny_analysis_new`].
 */
enum KemenyStatus kemeny_analysis_new_with_tolerance(size_t n,
                                                     const double *p,
                                                     double tol_cross,
                                                     struct KemenyAnalysis **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must be null or a live handle, not used afterwards.
 */
void kemeny_analysis_free(struct KemenyAnalysis *handle);

/**
 * Number of states. Returns 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
size_t kemeny_analysis_len(const struct KemenyAnalysis *handle);

/**
 * # Safety
 * `handle` must be null or a live handle; `out` must be writable.
 */
enum KemenyStatus kemeny_analysis_constants(const struct KemenyAnalysis *handle,
                                            struct KemenyConstants *out);

/**
 * # Safety
 * `handle` must be null or a live handle; `out` must be writable.
 */
enum KemenyStatus kemeny_analysis_geometry(const struct KemenyAnalysis *handle,
                                           struct KemenyGeometry *out);

/**
 * Copies the stationary distribution (`n` values).
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_stationary(const struct KemenyAnalysis *handle,
                                             double *buf,
                                             size_t len);

/**
 * Copies the per-state constants (`n` values).
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_per_state(const struct KemenyAnalysis *handle,
                                            double *buf,
                                            size_t len);

/**
 * Copies the hitting-time matrix (`n * n` values, row-major; entry
 * `(x, y)` is the mean time to reach `y` from `x`).
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_hitting_times(const struct KemenyAnalysis *handle,
                                                double *buf,
                                                size_t len);

/**
 * Copies the commute-time matrix (`n * n` values, row-major).
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_commute_times(const struct KemenyAnalysis *handle,
                                                double *buf,
                                                size_t len);

/**
 * Copies the barycentric coordinates of the circumcenter (`n` values).
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_circumcenter(const struct KemenyAnalysis *handle,
                                               double *buf,
                                               size_t len);

/**
 * Copies the simplex vertices: `(n - 1) * n` values, row-major, one
 * column per state.
 *
 * # Safety
 * `handle` must be null or a live handle; `buf` must hold `len` doubles.
 */
enum KemenyStatus kemeny_analysis_vertices(const struct KemenyAnalysis *handle,
                                           double *buf,
                                           size_t len);

/**
 * Seeded Monte Carlo estimate of Kemeny's constant.
 *
 * # Safety
 * `handle` must be null or a live handle; `out` must be writable.
 */
enum KemenyStatus kemeny_analysis_estimate(const struct KemenyAnalysis *handle,
                                           uint64_t samples,
                                           uint64_t seed,
                                           struct KemenyEstimate *out);

/**
 * Message for the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *kemeny_last_error(void);

/**
 * Static name of a status code.
 */
const char *kemeny_status_name(enum KemenyStatus status);

/**
 * Library version as a static string.
 */
const char *kemeny_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KEMENY_H */
