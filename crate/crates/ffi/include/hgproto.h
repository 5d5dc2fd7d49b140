#ifndef HGPROTO_H
#define HGPROTO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HgStatus {
  HG_STATUS_OK = 0,
  HG_STATUS_NULL_POINTER = 1,
  HG_STATUS_INVALID_CONFIG = 2,
  HG_STATUS_INVALID_DATA = 3,
  HG_STATUS_IO = 4,
  HG_STATUS_FORMAT = 5,
  HG_STATUS_BANK_UNINITIALIZED = 6,
  HG_STATUS_BUFFER_TOO_SMALL = 7,
  HG_STATUS_PANIC = 8,
} HgStatus;

/*
 Opaque prototype bank.
 */
typedef struct HgBank HgBank;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *hg_last_error(void);

/*
 Creates an uninitialized bank.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum HgStatus hg_bank_new(size_t k, size_t dim, size_t layers, uint64_t seed, struct HgBank **out);

/*
 # Safety
 `path` must be a NUL-terminated string and `out` valid for one write.
 */
enum HgStatus hg_bank_load(const char *path, struct HgBank **out);

/*
 # Safety
 `bank` must come from this library and `path` be NUL-terminated.
 */
enum HgStatus hg_bank_save(const struct HgBank *bank, const char *path);

/*
 Releases a bank; NULL is ignored.

 # Safety
 `bank` must come from this library and not be used afterwards.
 */
void hg_bank_free(struct HgBank *bank);

/*
 Writes K, D and the layer count; any output pointer may be NULL.

 # Safety
 `bank` must come from this library; non-null outputs must be writable.
 */
enum HgStatus hg_bank_shape(const struct HgBank *bank, size_t *k, size_t *dim, size_t *layers);

/*
 Copies the K×D global prototypes of `layer` into `out` (`len >= K·D`).

 # Safety
 `bank` must come from this library and `out` hold `len` doubles.
 */
enum HgStatus hg_bank_global_prototypes(const struct HgBank *bank,
                                        size_t layer,
                                        double *out,
                                        size_t len);

/*
 Fuzzy C-Means on an N×D matrix from a random membership start.

 Writes the N×K membership, the K×D centroids, the final objective and
 the number of iterations. `membership_out`, `centroids_out`,
 `objective_out` and `iterations_out` may each be NULL.

 # Safety
 `x` must hold `n·dim` doubles; non-null outputs must hold `n·k`, `k·dim`,
 one double and one size_t respectively.
 */
enum HgStatus hg_fcm_run(const double *x,
                         size_t n,
                         size_t dim,
                         size_t k,
                         double fuzzifier,
                         size_t max_iters,
                         uint64_t seed,
                         double *membership_out,
                         double *centroids_out,
                         double *objective_out,
                         size_t *iterations_out);

/*
 Evaluation forward pass of one layer with default layer settings and
 the bank's K. Writes the N×D amplified features and the K×D centroids
 (either output may be NULL).

 # Safety
 `bank` must come from this library; `x` must hold `n·dim` doubles and
 non-null outputs `n·dim` and `K·dim` doubles.
 */
enum HgStatus hg_forward(const struct HgBank *bank,
                         size_t layer,
                         const double *x,
                         size_t n,
                         size_t dim,
                         uint64_t seed,
                         double *features_out,
                         double *centroids_out);

/*
 Gap score of K×D sample centroids against the prototypes of `layer`.

 # Safety
 `bank` must come from this library, `centroids` hold `k·dim` doubles and
 `gap_out` be writable.
 */
enum HgStatus hg_gap_score(const struct HgBank *bank,
                           size_t layer,
                           const double *centroids,
                           size_t k,
                           size_t dim,
                           double *gap_out);

/*
 Analyzes a JSON system description and returns the report as a JSON
 string owned by the caller (release with [`hg_string_free`]).

 # Safety
 `json` must be NUL-terminated and `out` valid for one write.
 */
enum HgStatus hg_oinfo_analyze_json(const char *json, char **out);

/*
 Releases a string returned by this library; NULL is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void hg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGPROTO_H */
