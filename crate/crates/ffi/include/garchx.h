#ifndef GARCHX_H
#define GARCHX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GarchxStatus {
  GARCHX_STATUS_OK = 0,
  GARCHX_STATUS_NULL_POINTER = 1,
  GARCHX_STATUS_INVALID_ARGUMENT = 2,
  GARCHX_STATUS_INSUFFICIENT_DATA = 3,
  GARCHX_STATUS_DEGENERATE = 4,
  GARCHX_STATUS_NUMERICAL = 5,
  GARCHX_STATUS_IO = 6,
  GARCHX_STATUS_BUFFER_TOO_SMALL = 7,
  GARCHX_STATUS_PANIC = 99,
} GarchxStatus;

typedef enum GarchxTrend {
  GARCHX_TREND_NONE = 0,
  GARCHX_TREND_CONSTANT = 1,
  GARCHX_TREND_CONSTANT_TREND = 2,
} GarchxTrend;

typedef enum GarchxForecastMode {
  GARCHX_FORECAST_MODE_STATIC = 0,
  GARCHX_FORECAST_MODE_DYNAMIC = 1,
} GarchxForecastMode;

typedef enum GarchxTheilTarget {
  GARCHX_THEIL_TARGET_VARIANCE = 0,
  GARCHX_THEIL_TARGET_RETURNS = 1,
} GarchxTheilTarget;

/**
 * Aligned returns and exogenous values.
 */
typedef struct GarchxDataset GarchxDataset;

/**
 * A fitted model.
 */
typedef struct GarchxFit GarchxFit;

typedef struct GarchxSummary {
  size_t n;
  double mean;
  double median;
  double max;
  double min;
  double std_dev;
  double skewness;
  double kurtosis;
  double jarque_bera;
  double jb_p_value;
} GarchxSummary;

typedef struct GarchxUnitRoot {
  double statistic;
  double p_value;
  /**
   * Augmentation lags (ADF) or bandwidth (PP).
   */
  size_t lags_used;
  size_t nobs;
  double crit_1pct;
  double crit_5pct;
  double crit_10pct;
} GarchxUnitRoot;

typedef struct GarchxTest {
  double statistic;
  double p_value;
  size_t lags;
} GarchxTest;

typedef struct GarchxEvaluation {
  double rmse;
  double mae;
  double theil_u;
  size_t n;
} GarchxEvaluation;

typedef struct GarchxParams {
  double alpha0;
  double alpha1;
  double beta0;
  double beta1;
  double beta2;
} GarchxParams;

typedef struct GarchxFitOptions {
  size_t max_iterations;
  double f_tol;
  double x_tol;
  bool restart;
} GarchxFitOptions;

typedef struct GarchxFitSummary {
  struct GarchxParams params;
  /**
   * NaN when the Hessian is not invertible.
   */
  double std_errors[5];
  double z_stats[5];
  double p_values[5];
  double log_likelihood;
  size_t nobs;
  size_t iterations;
  bool converged;
} GarchxFitSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next `garchx_*` call on the same thread.
 */
const char *garchx_last_error(void);

/**
 * Library version as a static string.
 */
const char *garchx_version(void);

/**
 * # Safety
 * `statistic` and `p_value` must be valid for writes.
 */
enum GarchxStatus garchx_jarque_bera(size_t n,
                                     double skewness,
                                     double kurtosis,
                                     double *statistic,
                                     double *p_value);

/**
 * # Safety
 * `values` must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_summary(const double *values, size_t len, struct GarchxSummary *result);

/**
 * ADF test with BIC lag selection. A negative `max_lags` uses the default
 * maximum.
 *
 * # Safety
 * `values` must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_adf(const double *values,
                             size_t len,
                             enum GarchxTrend trend_kind,
                             int64_t max_lags,
                             struct GarchxUnitRoot *result);

/**
 * Phillips-Perron test. A negative `bandwidth` uses the automatic choice.
 *
 * # Safety
 * `values` must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_pp(const double *values,
                            size_t len,
                            enum GarchxTrend trend_kind,
                            int64_t bandwidth,
                            struct GarchxUnitRoot *result);

/**
 * # Safety
 * `values` must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_ljung_box(const double *values,
                                   size_t len,
                                   size_t lags,
                                   struct GarchxTest *result);

/**
 * # Safety
 * `values` must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_arch_lm(const double *values,
                                 size_t len,
                                 size_t lags,
                                 struct GarchxTest *result);

/**
 * Fills `result` with RMSE, MAE and Theil's U of `forecast` against `actual`.
 *
 * # Safety
 * Both arrays must point to `len` doubles; `result` must be valid for writes.
 */
enum GarchxStatus garchx_forecast_metrics(const double *actual,
                                          const double *forecast,
                                          size_t len,
                                          struct GarchxEvaluation *result);

/**
 * Writes `steps` dynamic variance forecasts starting from `first`.
 *
 * # Safety
 * `model` must be valid for reads and `buf` for `steps` writes.
 */
enum GarchxStatus garchx_dynamic_variance(const struct GarchxParams *model,
                                          double first,
                                          size_t steps,
                                          double *buf);

/**
 * Builds a dataset from parallel arrays dated daily from `start_date`
 * (`YYYY-MM-DD`, or null for 2000-01-01).
 *
 * # Safety
 * `returns` and `exog` must point to `len` doubles, `start_date` must be
 * null or a nul-terminated string, and `dataset_out` must be valid for
 * writes.
 */
enum GarchxStatus garchx_dataset_new(const double *returns,
                                     const double *exog,
                                     size_t len,
                                     const char *start_date,
                                     struct GarchxDataset **dataset_out);

/**
 * Simulates `length` observations with standard normal exogenous values.
 *
 * # Safety
 * `model` must be valid for reads and `dataset_out` for writes.
 */
enum GarchxStatus garchx_simulate(const struct GarchxParams *model,
                                  size_t length,
                                  uint64_t seed,
                                  struct GarchxDataset **dataset_out);

/**
 * Rows `first..=last` (0-based) of `dataset` as a new dataset.
 *
 * # Safety
 * `dataset` must be a live handle and `dataset_out` valid for writes.
 */
enum GarchxStatus garchx_dataset_slice(const struct GarchxDataset *dataset,
                                       size_t first,
                                       size_t last,
                                       struct GarchxDataset **dataset_out);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t garchx_dataset_len(const struct GarchxDataset *dataset);

/**
 * # Safety
 * `dataset` must be a live handle and `buf` valid for `cap` writes.
 */
enum GarchxStatus garchx_dataset_returns(const struct GarchxDataset *dataset,
                                         double *buf,
                                         size_t cap,
                                         size_t *written);

/**
 * # Safety
 * `dataset` must be a live handle and `buf` valid for `cap` writes.
 */
enum GarchxStatus garchx_dataset_exog(const struct GarchxDataset *dataset,
                                      double *buf,
                                      size_t cap,
                                      size_t *written);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void garchx_dataset_free(struct GarchxDataset *dataset);

/**
 * Optimizer defaults.
 */
struct GarchxFitOptions garchx_fit_options_default(void);

/**
 * Fits the model. A fit that stops at the iteration cap is still returned
 * (check `converged`). `options` may be null for the defaults.
 *
 * # Safety
 * `dataset` must be a live handle, `options` null or valid for reads, and
 * `fit_out` valid for writes.
 */
enum GarchxStatus garchx_fit(const struct GarchxDataset *dataset,
                             const struct GarchxFitOptions *options,
                             struct GarchxFit **fit_out);

/**
 * # Safety
 * `fit` must be a live handle and `result` valid for writes.
 */
enum GarchxStatus garchx_fit_summary(const struct GarchxFit *fit, struct GarchxFitSummary *result);

/**
 * In-sample conditional variances.
 *
 * # Safety
 * `fit` must be a live handle and `buf` valid for `cap` writes.
 */
enum GarchxStatus garchx_fit_cond_variance(const struct GarchxFit *fit,
                                           double *buf,
                                           size_t cap,
                                           size_t *written);

/**
 * # Safety
 * `fit` must be a live handle and `buf` valid for `cap` writes.
 */
enum GarchxStatus garchx_fit_std_residuals(const struct GarchxFit *fit,
                                           double *buf,
                                           size_t cap,
                                           size_t *written);

/**
 * Forecasts rows `first..=last` of `dataset`, which must come after the
 * estimation sample of `fit`, and scores them.
 *
 * # Safety
 * `fit` and `dataset` must be live handles and `result` valid for writes.
 */
enum GarchxStatus garchx_forecast_evaluate(const struct GarchxFit *fit,
                                           const struct GarchxDataset *dataset,
                                           size_t first,
                                           size_t last,
                                           enum GarchxForecastMode mode,
                                           enum GarchxTheilTarget target,
                                           struct GarchxEvaluation *result);

/**
 * # Safety
 * `fit` must be null or a handle not yet freed.
 */
void garchx_fit_free(struct GarchxFit *fit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GARCHX_H */
