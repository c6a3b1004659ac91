#ifndef KSVM_H
#define KSVM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KsvmStatus {
  KSVM_STATUS_OK = 0,
  KSVM_STATUS_NULL_ARGUMENT = 1,
  KSVM_STATUS_INVALID_ARGUMENT = 2,
  KSVM_STATUS_DIMENSION_MISMATCH = 3,
  KSVM_STATUS_PARSE = 4,
  KSVM_STATUS_IO = 5,
  /*
   The solver ran out of iterations or produced no support vectors.
   */
  KSVM_STATUS_SOLVER = 6,
  KSVM_STATUS_PANIC = 7,
} KsvmStatus;

/*
 Training or prediction data: dense or sparse rows with real targets.
 */
typedef struct KsvmDataset KsvmDataset;

/*
 A trained classifier, regressor or one-vs-one classifier.
 */
typedef struct KsvmModel KsvmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *ksvm_version(void);

/*
 Message for the last failed call on this thread, or an empty string.
 The pointer stays valid until the next `ksvm_` call on the same thread.
 */
const char *ksvm_last_error(void);

/*
 Builds a dataset from `n` row-major dense rows of `dim` values and `n`
 targets. Classification targets must be integral.

 # Safety
 `x` must point to `n * dim` doubles and `targets` to `n` doubles.
 */
enum KsvmStatus ksvm_dataset_new_dense(const double *x,
                                       size_t n,
                                       size_t dim,
                                       const double *targets,
                                       struct KsvmDataset **out);

/*
 Reads a dataset file: dense CSV for a `.csv` extension, otherwise the
 sparse `target index:value ...` format.

 # Safety
 `path` must be a NUL-terminated string.
 */
enum KsvmStatus ksvm_dataset_read(const char *path, struct KsvmDataset **out);

/*
 Number of samples, 0 for a null handle.

 # Safety
 `data` must be null or a live dataset handle.
 */
size_t ksvm_dataset_len(const struct KsvmDataset *data);

/*
 Feature dimension, 0 for a null handle.

 # Safety
 `data` must be null or a live dataset handle.
 */
size_t ksvm_dataset_dim(const struct KsvmDataset *data);

/*
 # Safety
 `data` must be null or a handle not yet freed.
 */
void ksvm_dataset_free(struct KsvmDataset *data);

/*
 Trains a binary classifier on labels -1/+1. `kernel` is `linear`,
 `poly:c=<r>,d=<i>` or `gauss:c=<r>`; a `tolerance` of 0 selects the
 default.

 # Safety
 `data` must be a live dataset handle and `kernel` a NUL-terminated string.
 */
enum KsvmStatus ksvm_train_svc(const struct KsvmDataset *data,
                               const char *kernel,
                               double cost,
                               double tolerance,
                               struct KsvmModel **out);

/*
 Trains an ε-insensitive regressor.

 # Safety
 As for [`ksvm_train_svc`].
 */
enum KsvmStatus ksvm_train_svr(const struct KsvmDataset *data,
                               const char *kernel,
                               double cost,
                               double epsilon,
                               double tolerance,
                               struct KsvmModel **out);

/*
 Trains a one-vs-one classifier on integral labels.

 # Safety
 As for [`ksvm_train_svc`].
 */
enum KsvmStatus ksvm_train_ovo(const struct KsvmDataset *data,
                               const char *kernel,
                               double cost,
                               double tolerance,
                               struct KsvmModel **out);

/*
 Predicts `n` dense rows into `out`: class labels for classifiers,
 regression values otherwise.

 # Safety
 `x` must point to `n * dim` doubles and `out` to room for `n`.
 */
enum KsvmStatus ksvm_model_predict(const struct KsvmModel *model,
                                   const double *x,
                                   size_t n,
                                   size_t dim,
                                   double *out);

/*
 Real-valued output for one dense row: the decision value of a binary
 classifier or the prediction of a regressor. Fails for one-vs-one models.

 # Safety
 `x` must point to `dim` doubles.
 */
enum KsvmStatus ksvm_model_decision(const struct KsvmModel *model,
                                    const double *x,
                                    size_t dim,
                                    double *out);

/*
 # Safety
 `model` must be a live handle and `path` a NUL-terminated string.
 */
enum KsvmStatus ksvm_model_save(const struct KsvmModel *model, const char *path);

/*
 # Safety
 `path` must be a NUL-terminated string.
 */
enum KsvmStatus ksvm_model_load(const char *path, struct KsvmModel **out);

/*
 Distinct support vectors, 0 for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
size_t ksvm_model_n_support(const struct KsvmModel *model);

/*
 Input dimension the model was trained on, 0 for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
size_t ksvm_model_dim(const struct KsvmModel *model);

/*
 `"svc"`, `"svr"` or `"ovo"` as a static string; null for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
const char *ksvm_model_task(const struct KsvmModel *model);

/*
 # Safety
 `model` must be null or a handle not yet freed.
 */
void ksvm_model_free(struct KsvmModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KSVM_H */
