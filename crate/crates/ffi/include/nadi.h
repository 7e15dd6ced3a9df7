#ifndef NADI_H
#define NADI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NadiStatus {
  NADI_STATUS_OK = 0,
  NADI_STATUS_NULL_POINTER = 1,
  NADI_STATUS_INVALID_UTF8 = 2,
  NADI_STATUS_INVALID_ARGUMENT = 3,
  NADI_STATUS_IO = 4,
  NADI_STATUS_DATA = 5,
  NADI_STATUS_PANIC = 6,
} NadiStatus;

/**
 * Opaque normalizer handle.
 */
typedef struct NadiNormalizer NadiNormalizer;

/**
 * Opaque handle to a pipeline loaded from a model directory.
 */
typedef struct NadiPredictor NadiPredictor;

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *nadi_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nadi_version(void);

/**
 * Create a normalizer. Markup, entity and noise stages are always on.
 *
 * # Safety
 *
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum NadiStatus nadi_normalizer_new(bool segment,
                                    bool insert_spacing,
                                    uint32_t max_repeat,
                                    struct NadiNormalizer **out);

/**
 * # Safety
 *
 * `handle` must be NULL or a pointer from [`nadi_normalizer_new`] that has
 * not been freed.
 */
void nadi_normalizer_free(struct NadiNormalizer *handle);

/**
 * Normalize `input` into a newly allocated string.
 *
 * # Safety
 *
 * `handle` must be a live normalizer, `input` a NUL-terminated string and
 * `out` writable.
 */
enum NadiStatus nadi_normalize(const struct NadiNormalizer *handle, const char *input, char **out);

/**
 * Release a string returned by this library.
 *
 * # Safety
 *
 * `s` must be NULL or a string returned through an out-parameter of this
 * library that has not been freed.
 */
void nadi_string_free(char *s);

/**
 * Load a pipeline directory written by `nadi train` or `nadi benchmark`.
 *
 * # Safety
 *
 * `dir` must be a NUL-terminated path and `out` writable.
 */
enum NadiStatus nadi_predictor_load(const char *dir, struct NadiPredictor **out);

/**
 * Predict the label of one raw tweet.
 *
 * # Safety
 *
 * `handle` must be a live predictor, `input` a NUL-terminated string and
 * `out` writable.
 */
enum NadiStatus nadi_predictor_predict(const struct NadiPredictor *handle,
                                       const char *input,
                                       char **out);

/**
 * Number of classes of a loaded predictor, or 0 for NULL.
 *
 * # Safety
 *
 * `handle` must be NULL or a live predictor.
 */
size_t nadi_predictor_num_classes(const struct NadiPredictor *handle);

/**
 * # Safety
 *
 * `handle` must be NULL or a pointer from [`nadi_predictor_load`] that has
 * not been freed.
 */
void nadi_predictor_free(struct NadiPredictor *handle);

/**
 * Macro F1 of `pred` against `gold` (both `n` labels) over the `k` labels
 * of `vocab`.
 *
 * # Safety
 *
 * `gold` and `pred` must point to `n` NUL-terminated strings, `vocab` to `k`,
 * and `out` must be writable.
 */
enum NadiStatus nadi_macro_f1(const char *const *gold,
                              const char *const *pred,
                              size_t n,
                              const char *const *vocab,
                              size_t k,
                              double *out);

#endif  /* NADI_H */
