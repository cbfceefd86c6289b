#ifndef INFLATION_H
#define INFLATION_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum InflStatus {
  INFL_STATUS_OK = 0,
  // A required pointer argument was null.
  INFL_STATUS_NULL_POINTER = 1,
  // Malformed input: bad lengths, invalid UTF-8, unsorted knots, bad report.
  INFL_STATUS_INVALID_ARGUMENT = 2,
  // CSV text could not be parsed.
  INFL_STATUS_PARSE = 3,
  // Time outside the function's domain, or a model value not positive.
  INFL_STATUS_DOMAIN = 4,
  // `1 + rate <= 0` somewhere on the interval.
  INFL_STATUS_RATE_DOMAIN = 5,
  // Quadrature could not reach the tolerance.
  INFL_STATUS_ACCURACY = 6,
  // Internal panic; the library state is unchanged.
  INFL_STATUS_PANIC = 7,
} InflStatus;

// Opaque rate-per-unit-time function.
typedef struct InflRate InflRate;

// Opaque CPI series.
typedef struct InflSeries InflSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or an empty
// string if it succeeded. Valid until the next call on the same thread.
const char *infl_last_error_message(void);

// Parses `time,value` CSV text (month codes such as `1993.01` allowed).
//
// # Safety
// `csv` must be a nul-terminated string; `out` must be writable.
enum InflStatus infl_series_from_csv(const char *csv, struct InflSeries **out);

// Builds a series from `len` decimal-year times and positive values.
//
// # Safety
// `times` and `values` must each point to `len` doubles; `out` must be
// writable.
enum InflStatus infl_series_from_arrays(const double *times,
                                        const double *values,
                                        size_t len,
                                        struct InflSeries **out);

// The monthly CPI series compiled into the library.
//
// # Safety
// `out` must be writable.
enum InflStatus infl_series_bundled(struct InflSeries **out);

// Number of observations, or 0 for a null handle.
//
// # Safety
// `series` must be null or a live handle.
size_t infl_series_len(const struct InflSeries *series);

// # Safety
// `series` must be null or a handle not yet freed.
void infl_series_free(struct InflSeries *series);

// Constant rate `i` per unit time.
//
// # Safety
// `out` must be writable.
enum InflStatus infl_rate_constant(double i, struct InflRate **out);

// Piecewise-constant rate: `values[k]` on `[knots[k], knots[k + 1])`, so
// `knots` holds `n_values + 1` strictly increasing times.
//
// # Safety
// `knots` must point to `n_values + 1` doubles and `values` to `n_values`;
// `out` must be writable.
enum InflStatus infl_rate_piecewise(const double *knots,
                                    const double *values,
                                    size_t n_values,
                                    struct InflRate **out);

// Rate of the piecewise-affine interpolant through the series.
//
// # Safety
// `series` must be a live handle; `out` must be writable.
enum InflStatus infl_rate_affine(const struct InflSeries *series, struct InflRate **out);

// Rate of the log-linear interpolant through the series (piecewise constant).
//
// # Safety
// `series` must be a live handle; `out` must be writable.
enum InflStatus infl_rate_loglinear(const struct InflSeries *series, struct InflRate **out);

// Published eight-term trigonometric rate for the bundled series.
//
// # Safety
// `out` must be writable.
enum InflStatus infl_rate_published_trig(struct InflRate **out);

// Rate described by a JSON fit report as written by `inflation --json`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum InflStatus infl_rate_from_report(const char *json, struct InflRate **out);

// # Safety
// `rate` must be null or a handle not yet freed.
void infl_rate_free(struct InflRate *rate);

// Rate per unit time at `t` (right-hand limit at knots).
//
// # Safety
// `rate` must be a live handle; `out` must be writable.
enum InflStatus infl_rate_eval(const struct InflRate *rate, double t, double *out);

// Rate and growth factor over `[t0, t1]`. `tol <= 0` selects the default
// quadrature tolerance. Either out-pointer may be null.
//
// # Safety
// `rate` must be a live handle; non-null out-pointers must be writable.
enum InflStatus infl_accumulate(const struct InflRate *rate,
                                double t0,
                                double t1,
                                double tol,
                                double *rate_out,
                                double *growth_out);

// Real value at `t1` of `x0` held from `t0`.
//
// # Safety
// `rate` must be a live handle; `out` must be writable.
enum InflStatus infl_real_value(const struct InflRate *rate,
                                double x0,
                                double t0,
                                double t1,
                                double tol,
                                double *out);

// Sum over consecutive observations of the squared gap between the rate's
// growth factor and the observed CPI ratio.
//
// # Safety
// `rate` and `series` must be live handles; `out` must be writable.
enum InflStatus infl_functional_residual(const struct InflRate *rate,
                                         const struct InflSeries *series,
                                         double tol,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFLATION_H */
