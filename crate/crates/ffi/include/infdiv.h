#ifndef INFDIV_H
#define INFDIV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define INFDIV_STAT_T3 1

#define INFDIV_STAT_T4 2

#define INFDIV_STAT_TMOM 4

#define INFDIV_STAT_T2 8

typedef enum InfdivStatus {
  INFDIV_STATUS_OK = 0,
  INFDIV_STATUS_INVALID_ARGUMENT = 1,
  INFDIV_STATUS_NUMERIC_FAILURE = 2,
  INFDIV_STATUS_DATA_ERROR = 3,
  INFDIV_STATUS_NULL_POINTER = 4,
  INFDIV_STATUS_PANIC = 5,
} InfdivStatus;

/**
 * Opaque test report handle.
 */
typedef struct InfdivReport InfdivReport;

/**
 * Opaque sample handle.
 */
typedef struct InfdivSample InfdivSample;

/**
 * Test settings. Zero or negative optional fields mean "not set".
 */
typedef struct InfdivTestConfig {
  /**
   * Largest grid point; `<= 0` selects `8 / sigma` from the data.
   */
  double grid_t_max;
  uint32_t grid_points;
  /**
   * Bitwise OR of `INFDIV_STAT_*`.
   */
  uint32_t statistics;
  double r_order;
  uint32_t bootstrap_b;
  double alpha;
  uint64_t seed;
  /**
   * m-divisibility hypothesis, `0` for none.
   */
  uint32_t m_hypothesis;
  /**
   * Nonzero: data already symmetric about 0.
   */
  uint8_t symmetric;
  /**
   * `<= 0` estimates the radius from the data.
   */
  double support_radius;
  uint32_t max_pairs;
} InfdivTestConfig;

typedef struct InfdivStatisticResult {
  /**
   * One of `INFDIV_STAT_*`.
   */
  uint32_t statistic;
  double observed;
  double p_value;
  double adjusted_p_value;
  double critical_value;
  /**
   * NaN when the statistic has no grid location.
   */
  double argmax_t;
} InfdivStatisticResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *infdiv_last_error(void);

/**
 * Copies `n` finite values into a new sample.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` must be writable.
 */
enum InfdivStatus infdiv_sample_new(const double *values, size_t n, struct InfdivSample **out);

/**
 * Draws `n` values from a registry distribution with default parameters.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum InfdivStatus infdiv_sample_from_registry(const char *name,
                                              size_t n,
                                              uint64_t seed,
                                              struct InfdivSample **out);

/**
 * Number of values in the sample, 0 for null.
 *
 * # Safety
 * `sample` must be null or a live handle.
 */
size_t infdiv_sample_len(const struct InfdivSample *sample);

/**
 * # Safety
 * `sample` must be null or a handle not yet freed.
 */
void infdiv_sample_free(struct InfdivSample *sample);

struct InfdivTestConfig infdiv_test_config_default(void);

/**
 * Runs the bootstrap test.
 *
 * # Safety
 * `sample` and `config` must be valid pointers; `out` must be writable.
 */
enum InfdivStatus infdiv_run_test(const struct InfdivSample *sample,
                                  const struct InfdivTestConfig *config,
                                  struct InfdivReport **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void infdiv_report_free(struct InfdivReport *report);

/**
 * 1 for a rejection, 0 for no evidence against, -1 for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t infdiv_report_decision(const struct InfdivReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t infdiv_report_statistic_count(const struct InfdivReport *report);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum InfdivStatus infdiv_report_statistic(const struct InfdivReport *report,
                                          size_t index,
                                          struct InfdivStatisticResult *out);

/**
 * JSON rendering of the report, identical to the CLI's. Free the string
 * with [`infdiv_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum InfdivStatus infdiv_report_to_json(const struct InfdivReport *report, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void infdiv_string_free(char *s);

/**
 * First positive root of `sin z - z cos z`.
 *
 * # Safety
 * `value` must be writable; `residual` may be null.
 */
enum InfdivStatus infdiv_root_z0(double *value, double *residual);

/**
 * # Safety
 * `out` must be writable.
 */
enum InfdivStatus infdiv_gamma(double x, double *out);

/**
 * `E|Y|^r` for `Y ~ N(0, sigma^2)`, `0 < r < 2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum InfdivStatus infdiv_gaussian_abs_moment(double sigma, double r, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum InfdivStatus infdiv_cr_constant(double r, double *out);

/**
 * Empirical CF at `len` points. Any of the output arrays may be null;
 * `sym_out` receives the symmetrized (U-statistic) values.
 *
 * # Safety
 * `sample` must be a live handle, `t` must hold `len` doubles and each
 * non-null output must have room for `len` doubles.
 */
enum InfdivStatus infdiv_ecf(const struct InfdivSample *sample,
                             const double *t,
                             size_t len,
                             double *re_out,
                             double *im_out,
                             double *sym_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INFDIV_H */
