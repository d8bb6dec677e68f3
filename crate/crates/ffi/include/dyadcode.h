#ifndef DYADCODE_H
#define DYADCODE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_ARGUMENT = 2,
  DC_STATUS_IO = 3,
  DC_STATUS_PARSE = 4,
  /**
   * The data cannot support the request (one label only, too few pairs, ...).
   */
  DC_STATUS_DATA = 5,
  DC_STATUS_CONFIG = 6,
  DC_STATUS_PANIC = 99,
} DcStatus;

typedef struct DcCorpus DcCorpus;

typedef struct DcLexicon DcLexicon;

typedef struct DcModel DcModel;

typedef struct DcCorpusStats {
  size_t n_total;
  size_t n_positive;
  size_t n_negative;
  size_t n_couples;
} DcCorpusStats;

typedef struct DcWilcoxon {
  /**
   * min(W+, W-)
   */
  double statistic;
  double w_plus;
  double w_minus;
  double p_value;
  /**
   * Pairs left after dropping zero differences.
   */
  size_t n_effective;
  /**
   * 1 when the exact null distribution was used, 0 for the normal approximation.
   */
  int32_t exact;
} DcWilcoxon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *dc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dc_version(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcStatus dc_corpus_load(const char *path, struct DcCorpus **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcStatus dc_corpus_parse(const char *text, struct DcCorpus **out);

/**
 * Number of sequences; 0 for a NULL handle.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
size_t dc_corpus_len(const struct DcCorpus *corpus);

/**
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
enum DcStatus dc_corpus_stats(const struct DcCorpus *corpus, struct DcCorpusStats *out);

/**
 * New corpus without the sequences whose transcript has no words.
 *
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
enum DcStatus dc_corpus_drop_empty(const struct DcCorpus *corpus, struct DcCorpus **out);

/**
 * # Safety
 * `corpus` must be NULL or a handle not yet freed.
 */
void dc_corpus_free(struct DcCorpus *corpus);

/**
 * Parses a DIC-format lexicon.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcStatus dc_lexicon_parse(const char *text, struct DcLexicon **out);

/**
 * Number of feature columns (one per category).
 *
 * # Safety
 * `lexicon` must be NULL or a live handle.
 */
size_t dc_lexicon_num_categories(const struct DcLexicon *lexicon);

/**
 * Writes the category proportions (count / word count) of `text` into `values` (capacity
 * `capacity`, which must be at least the number of categories) and the
 * token count into `word_count` (may be NULL).
 *
 * # Safety
 * Pointers must be valid; `values` must hold `capacity` doubles.
 */
enum DcStatus dc_lexicon_featurize(const struct DcLexicon *lexicon,
                                   const char *text,
                                   double *values,
                                   size_t capacity,
                                   size_t *word_count);

/**
 * # Safety
 * `lexicon` must be NULL or a handle not yet freed.
 */
void dc_lexicon_free(struct DcLexicon *lexicon);

/**
 * Trains an RBF-kernel SVM on the row-major `rows x cols` matrix `x`.
 *
 * `gamma <= 0` selects `1 / (cols * variance of x)`. With `balanced != 0`
 * each class's box bound is scaled by `rows / (2 * class size)`.
 *
 * # Safety
 * `x` must hold `rows * cols` doubles, `labels` `rows` bytes, and `out`
 * must be a valid pointer.
 */
enum DcStatus dc_svm_train(const double *x,
                           size_t rows,
                           size_t cols,
                           const uint8_t *labels,
                           double c,
                           double gamma,
                           int32_t balanced,
                           struct DcModel **out);

/**
 * Input dimension of the model; 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t dc_svm_dim(const struct DcModel *model);

/**
 * # Safety
 * `model` must be a live handle, `x` must hold `len` doubles and `out`
 * must be a valid pointer.
 */
enum DcStatus dc_svm_decision(const struct DcModel *model,
                              const double *x,
                              size_t len,
                              double *out);

/**
 * Predicted label (1 = positive, 2 = negative).
 *
 * # Safety
 * Same contract as [`dc_svm_decision`].
 */
enum DcStatus dc_svm_predict(const struct DcModel *model,
                             const double *x,
                             size_t len,
                             uint8_t *out);

/**
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum DcStatus dc_svm_save(const struct DcModel *model, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DcStatus dc_svm_load(const char *path, struct DcModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void dc_svm_free(struct DcModel *model);

/**
 * Balanced accuracy of a confusion matrix given as
 * `{pos->pos, pos->neg, neg->pos, neg->neg}` (true label first).
 *
 * # Safety
 * `counts` must point to 4 integers and `out` must be a valid pointer.
 */
enum DcStatus dc_balanced_accuracy(const uint64_t *counts, double *out);

/**
 * Two-sided Wilcoxon signed-rank test on the pairs `(a[i], b[i])`.
 *
 * # Safety
 * `a` and `b` must hold `n` doubles and `out` must be a valid pointer.
 */
enum DcStatus dc_wilcoxon(const double *a, const double *b, size_t n, struct DcWilcoxon *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYADCODE_H */
