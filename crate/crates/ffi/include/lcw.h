#ifndef LCW_H
#define LCW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes of fallible calls.
 */
typedef enum LcwStatus {
  LCW_STATUS_OK = 0,
  LCW_STATUS_NULL_POINTER = 1,
  LCW_STATUS_INVALID_UTF8 = 2,
  /**
   * Unparsable metric, unknown name, wrong point length or unknown tensor.
   */
  LCW_STATUS_INPUT_ERROR = 3,
  /**
   * Singular or indefinite metric, domain error or failed solve.
   */
  LCW_STATUS_MATH_ERROR = 4,
  LCW_STATUS_PANIC = 5,
} LcwStatus;

/**
 * Outcome of the obstruction test; values match the `lcw check` exit codes.
 */
typedef enum LcwVerdict {
  LCW_VERDICT_PASSES = 0,
  LCW_VERDICT_FAILS = 10,
  LCW_VERDICT_INCONCLUSIVE = 11,
} LcwVerdict;

/**
 * Opaque metric handle.
 */
typedef struct LcwMetric LcwMetric;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread; empty when none failed.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *lcw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lcw_version(void);

/**
 * Parse a metric file.
 *
 * # Safety
 * `text` is a NUL-terminated string and `out` is writable. On success `*out` owns a
 * handle to release with [`lcw_metric_free`].
 */
enum LcwStatus lcw_metric_parse(const char *text, struct LcwMetric **out);

/**
 * Metric of a coordinate catalog entry such as `nil` or `r_cross_surface:sin(x2)`.
 *
 * # Safety
 * As [`lcw_metric_parse`].
 */
enum LcwStatus lcw_metric_from_catalog(const char *name, struct LcwMetric **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `m` is null or a handle from this library that has not been freed.
 */
void lcw_metric_free(struct LcwMetric *m);

/**
 * Dimension of the metric, or 0 for a null handle.
 *
 * # Safety
 * `m` is null or a live handle.
 */
size_t lcw_metric_dim(const struct LcwMetric *m);

/**
 * Tensors at a point as JSON. `which` is a comma-separated list of tensor names, or
 * null for all of them.
 *
 * # Safety
 * `m` is a live handle, `point` holds `len` doubles, `which` is null or NUL-terminated,
 * and `out` is writable. On success `*out` is released with [`lcw_string_free`].
 */
enum LcwStatus lcw_tensors_json(const struct LcwMetric *m,
                                const double *point,
                                size_t len,
                                const char *which,
                                char **out);

/**
 * Obstruction test at a point: Cotton-York in dimension 3, eigenflag on the Weyl
 * operator above. Writes the report as JSON and the verdict.
 *
 * # Safety
 * As [`lcw_tensors_json`]; `verdict` is writable.
 */
enum LcwStatus lcw_check_json(const struct LcwMetric *m,
                              const double *point,
                              size_t len,
                              double tol,
                              uint64_t seed,
                              char **out,
                              enum LcwVerdict *verdict);

/**
 * Dimension report of the Weyl space and eigenflag subset, `4 <= n <= 6`, as JSON.
 *
 * # Safety
 * `out` is writable.
 */
enum LcwStatus lcw_weyl_space_json(size_t n, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or a string from this library that has not been freed.
 */
void lcw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCW_H */
