#ifndef CADPIPE_H
#define CADPIPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CadpipeStatus {
  CADPIPE_STATUS_OK = 0,
  CADPIPE_STATUS_NULL_POINTER = 1,
  CADPIPE_STATUS_INVALID_ARGUMENT = 2,
  CADPIPE_STATUS_PARSE = 3,
  CADPIPE_STATUS_DATA = 4,
  CADPIPE_STATUS_CONFIG = 5,
  CADPIPE_STATUS_IO = 6,
  CADPIPE_STATUS_INTEGRITY = 7,
  CADPIPE_STATUS_PANIC = 8,
} CadpipeStatus;

/**
 * Opaque dataset handle.
 */
typedef struct CadpipeDataset CadpipeDataset;

/**
 * Positive-class metrics of one set of predictions.
 */
typedef struct CadpipeMetrics {
  size_t tp;
  size_t fp;
  size_t tn;
  size_t fn_;
  double recall;
  double precision;
  double f1;
  double accuracy;
} CadpipeMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next library call on this thread.
 */
const char *cadpipe_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cadpipe_version(void);

/**
 * Builds a dataset from a row-major `n x d` feature array and `n` labels.
 * Feature names are `x0`, `x1`, ...
 *
 * # Safety
 * `features` must hold `n * d` doubles, `labels` `n` bytes, and `out` must
 * be writable.
 */
enum CadpipeStatus cadpipe_dataset_new(const double *features,
                                       size_t n,
                                       size_t d,
                                       const uint8_t *labels,
                                       struct CadpipeDataset **out);

/**
 * Reads a dataset in the columnar CSV format written by the pipeline.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum CadpipeStatus cadpipe_dataset_read_csv(const char *path, struct CadpipeDataset **out);

/**
 * Releases a dataset. Null is ignored.
 *
 * # Safety
 * `ds` must be null or a handle from this library not yet freed.
 */
void cadpipe_dataset_free(struct CadpipeDataset *ds);

/**
 * Writes the row and feature counts.
 *
 * # Safety
 * `ds` must be a live handle; `rows` and `cols` writable.
 */
enum CadpipeStatus cadpipe_dataset_shape(const struct CadpipeDataset *ds,
                                         size_t *rows,
                                         size_t *cols);

/**
 * Copies the row-major features into `out`, which must hold exactly
 * `rows * cols` doubles.
 *
 * # Safety
 * `ds` must be a live handle and `out` writable for `len` doubles.
 */
enum CadpipeStatus cadpipe_dataset_features(const struct CadpipeDataset *ds,
                                            double *out,
                                            size_t len);

/**
 * Copies the labels into `out`, which must hold exactly `rows` bytes.
 *
 * # Safety
 * `ds` must be a live handle and `out` writable for `len` bytes.
 */
enum CadpipeStatus cadpipe_dataset_labels(const struct CadpipeDataset *ds,
                                          uint8_t *out,
                                          size_t len);

/**
 * Borderline-SMOTE until both classes are equal. The input rows come
 * first in the result, followed by the synthetic rows.
 *
 * # Safety
 * `ds` must be a live handle and `out` writable.
 */
enum CadpipeStatus cadpipe_borderline_smote(const struct CadpipeDataset *ds,
                                            size_t m_neighbors,
                                            size_t k_neighbors,
                                            uint64_t seed,
                                            struct CadpipeDataset **out);

/**
 * Rank-based ROC AUC of `n` scores against `n` labels.
 *
 * # Safety
 * `scores` and `labels` must hold `n` elements; `out` must be writable.
 */
enum CadpipeStatus cadpipe_roc_auc(const double *scores,
                                   const uint8_t *labels,
                                   size_t n,
                                   double *out);

/**
 * Confusion counts and positive-class metrics. Undefined ratios are 0.
 *
 * # Safety
 * `labels` and `predictions` must hold `n` bytes; `out` must be writable.
 */
enum CadpipeStatus cadpipe_metrics(const uint8_t *labels,
                                   const uint8_t *predictions,
                                   size_t n,
                                   struct CadpipeMetrics *out);

/**
 * Assigns each of `n` rows to one of `k` folds. With `labels` non-null the
 * split is stratified by class.
 *
 * # Safety
 * `labels` must be null or hold `n` bytes; `fold_of_row` must hold `n`
 * elements.
 */
enum CadpipeStatus cadpipe_kfold(size_t n,
                                 size_t k,
                                 uint64_t seed,
                                 const uint8_t *labels,
                                 size_t *fold_of_row);

/**
 * Runs every pipeline stage from a config file. `mode` may be null to use
 * the config's mode, or one of `paper-faithful`, `leakage-safe`, `both`.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `mode` null or one.
 */
enum CadpipeStatus cadpipe_run_all(const char *config_path, const char *mode);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CADPIPE_H */
