#ifndef QKGEO_H
#define QKGEO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QkStatus {
  QK_STATUS_OK = 0,
  QK_STATUS_NULL_POINTER = 1,
  QK_STATUS_INVALID_UTF8 = 2,
  /**
   * Unknown target or check name.
   */
  QK_STATUS_REGISTRY = 3,
  /**
   * Invalid parameters, tolerance or sample count.
   */
  QK_STATUS_PARAMETERS = 4,
  /**
   * Point outside the chart, or a point of the wrong dimension.
   */
  QK_STATUS_DOMAIN = 5,
  /**
   * Degenerate metric, form or moment map, or a failed quadrature.
   */
  QK_STATUS_NUMERICAL = 6,
  /**
   * The operation does not apply to the target.
   */
  QK_STATUS_NOT_APPLICABLE = 7,
  /**
   * Output buffer too small.
   */
  QK_STATUS_BUFFER_TOO_SMALL = 8,
  QK_STATUS_PANIC = 9,
} QkStatus;

/**
 * Check verdicts.
 */
typedef enum QkVerdict {
  QK_VERDICT_PASS = 0,
  QK_VERDICT_FAIL = 1,
  QK_VERDICT_SKIP = 2,
} QkVerdict;

/**
 * The report of one check.
 */
typedef struct QkReport QkReport;

/**
 * A built target model.
 */
typedef struct QkTarget QkTarget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *qk_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library on the same thread.
 */
const char *qk_last_error(void);

/**
 * Number of registered checks.
 */
size_t qk_check_count(void);

/**
 * Name of check `index`, a static string; NULL when out of range.
 */
const char *qk_check_name(size_t index);

/**
 * Builds the target named `id` (e.g. `"gabc:0,1,1,-1"`).
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` writable.
 */
enum QkStatus qk_target_new(const char *id, struct QkTarget **out);

/**
 * # Safety
 * `target` must come from [`qk_target_new`] and not be used afterwards.
 */
void qk_target_free(struct QkTarget *target);

/**
 * Chart dimension.
 *
 * # Safety
 * `target` must be a live handle and `out` writable.
 */
enum QkStatus qk_target_dim(const struct QkTarget *target, size_t *out);

/**
 * Metric components `g_ij` (row-major, `dim²` values) at `point`.
 *
 * # Safety
 * `point` must hold `len` values and `out` `out_len` values.
 */
enum QkStatus qk_metric_at(const struct QkTarget *target,
                           const double *point,
                           size_t len,
                           double *out,
                           size_t out_len);

/**
 * Curvature norm of the target metric at `point`.
 *
 * # Safety
 * `point` must hold `len` values and `out` be writable.
 */
enum QkStatus qk_curvature_norm(const struct QkTarget *target,
                                const double *point,
                                size_t len,
                                double *out);

/**
 * Scalar curvature of the target metric at `point`.
 *
 * # Safety
 * As [`qk_curvature_norm`].
 */
enum QkStatus qk_scalar_curvature(const struct QkTarget *target,
                                  const double *point,
                                  size_t len,
                                  double *out);

/**
 * Closed-form curvature norm of the `(a, b, c, K)` family at `rho`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QkStatus qk_curvature_norm_formula(double a,
                                        double b,
                                        double c,
                                        double k,
                                        double rho,
                                        double *out);

/**
 * Runs check `name` on target `target`. A `tolerance` of zero or less keeps
 * the registry tolerance.
 *
 * # Safety
 * `name` and `target` must be NUL-terminated strings and `out` writable.
 */
enum QkStatus qk_check_run(const char *name,
                           const char *target,
                           size_t samples,
                           uint64_t seed,
                           double tolerance,
                           struct QkReport **out);

/**
 * # Safety
 * `report` must come from [`qk_check_run`] and not be used afterwards.
 */
void qk_report_free(struct QkReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QkStatus qk_report_verdict(const struct QkReport *report, enum QkVerdict *out);

/**
 * Largest residual over the samples (infinite when evaluation failed).
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QkStatus qk_report_max_abs(const struct QkReport *report, double *out);

/**
 * Mean residual over the samples.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QkStatus qk_report_mean_abs(const struct QkReport *report, double *out);

/**
 * The report as JSON; release with [`qk_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum QkStatus qk_report_json(const struct QkReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void qk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QKGEO_H */
