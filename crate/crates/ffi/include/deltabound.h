#ifndef DELTABOUND_H
#define DELTABOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DbMode {
  DB_MODE_PAPER_FAITHFUL = 0,
  DB_MODE_TIGHT = 1,
} DbMode;

typedef enum DbStatus {
  DB_STATUS_OK = 0,
  DB_STATUS_NULL_POINTER = 1,
  DB_STATUS_INVALID_UTF8 = 2,
  DB_STATUS_CONFIG = 3,
  DB_STATUS_USAGE = 4,
  DB_STATUS_DOMAIN = 5,
  DB_STATUS_CONVERGENCE = 6,
  DB_STATUS_OUT_OF_RANGE = 7,
  DB_STATUS_PANIC = 8,
} DbStatus;

/**
 * An evaluated bound.
 */
typedef struct DbReport DbReport;

/**
 * Genus, systole and first nonzero eigenvalue of a surface.
 */
typedef struct DbSurface {
  uint64_t genus;
  double systole;
  double lambda1;
} DbSurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Evaluates a scenario given as JSON text. `mode_override` < 0 keeps the
 * file's mode; 0 and 1 select a [`DbMode`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DbStatus db_bound_from_json(const char *json,
                                 int32_t mode_override,
                                 bool rounded,
                                 struct DbReport **out);

/**
 * Bound for a single surface.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DbStatus db_intrinsic_bound(struct DbSurface surface,
                                 enum DbMode mode,
                                 bool rounded,
                                 struct DbReport **out);

/**
 * Bound for an unramified covering of `base`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DbStatus db_unramified_bound(struct DbSurface base,
                                  struct DbSurface cover,
                                  enum DbMode mode,
                                  bool rounded,
                                  struct DbReport **out);

/**
 * Bound for a covering ramified over points whose mutual distances and
 * the base systole lie in `[r0, big_r0]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DbStatus db_ramified_bound(struct DbSurface base,
                                struct DbSurface cover,
                                double r0,
                                double big_r0,
                                enum DbMode mode,
                                bool rounded,
                                struct DbReport **out);

/**
 * Weight-one heat kernel at `(t, rho)` with its quadrature error estimate.
 *
 * # Safety
 * `value` and `error_estimate` must be valid pointers.
 */
enum DbStatus db_k1(double t, double rho, double *value, double *error_estimate);

/**
 * Natural log of the geodesic counting constant for a surface.
 *
 * # Safety
 * `ln_value` must be a valid pointer.
 */
enum DbStatus db_huber_constant(struct DbSurface surface,
                                enum DbMode mode,
                                bool rounded,
                                double *ln_value);

/**
 * Sign (-1, 0 or 1), natural log and base-10 log of the bound's absolute value.
 *
 * # Safety
 * `report` must be a live handle; output pointers may be null.
 */
enum DbStatus db_report_value(const struct DbReport *report,
                              int32_t *sign,
                              double *ln_abs,
                              double *log10_abs);

/**
 * Number of labelled terms, or 0 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t db_report_term_count(const struct DbReport *report);

/**
 * Label and natural log of term `index`. The label lives as long as the
 * report.
 *
 * # Safety
 * `report` must be a live handle; output pointers may be null.
 */
enum DbStatus db_report_term(const struct DbReport *report,
                             size_t index,
                             const char **label,
                             double *ln_abs);

/**
 * The JSON report, identical to the command-line output. Owned by the
 * report; null for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *db_report_json(const struct DbReport *report);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void db_report_free(struct DbReport *report);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *db_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *db_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DELTABOUND_H */
