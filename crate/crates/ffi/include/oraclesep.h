#ifndef ORACLESEP_H
#define ORACLESEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success.
 */
typedef enum OsStatus {
  OS_STATUS_OK = 0,
  OS_STATUS_NULL_POINTER = 1,
  OS_STATUS_INVALID_ARGUMENT = 2,
  OS_STATUS_OUT_OF_RANGE = 3,
  OS_STATUS_BOT = 4,
  OS_STATUS_INTERNAL = 5,
} OsStatus;

/**
 * Adversaries for [`oraclesep_owp_experiment`].
 */
typedef enum OsOwpAdversary {
  OS_OWP_ADVERSARY_RANDOM_GUESS = 0,
  OS_OWP_ADVERSARY_ECHO = 1,
  OS_OWP_ADVERSARY_EXHAUSTIVE = 2,
  OS_OWP_ADVERSARY_BOUNDED_SEARCH = 3,
  OS_OWP_ADVERSARY_EVAL_SEARCH = 4,
  OS_OWP_ADVERSARY_EVAL_PROBE = 5,
} OsOwpAdversary;

/**
 * A sampled oracle bundle (f, Obf, Eval).
 */
typedef struct OsBundle OsBundle;

/**
 * Rows from a verification suite.
 */
typedef struct OsReports OsReports;

/**
 * One checked inequality `lhs ≤ rhs`.
 */
typedef struct OsSlackReport {
  uint64_t seed;
  double lhs;
  double rhs;
  double slack;
  bool pass;
} OsSlackReport;

/**
 * Hit counts of a hybrid experiment.
 */
typedef struct OsOwpCounts {
  uint64_t trials;
  uint64_t hit_x;
  uint64_t hit_x2;
  uint64_t hit_differ;
} OsOwpCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *oraclesep_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *oraclesep_version(void);

/**
 * Samples the bundle for `lambda` and `seed`.
 *
 * # Safety
 *
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum OsStatus oraclesep_bundle_new(uint32_t lambda, uint64_t seed, struct OsBundle **out);

/**
 * # Safety
 *
 * `bundle` must be NULL or a handle from [`oraclesep_bundle_new`] that has
 * not been freed.
 */
void oraclesep_bundle_free(struct OsBundle *bundle);

/**
 * # Safety
 *
 * `bundle` must be a live handle or NULL.
 */
uint32_t oraclesep_bundle_lambda(const struct OsBundle *bundle);

/**
 * `f(x)`.
 *
 * # Safety
 *
 * `bundle` must be a live handle; `out` must be writable.
 */
enum OsStatus oraclesep_bundle_f(const struct OsBundle *bundle, uint64_t x, uint64_t *out);

/**
 * `Obf(c, r)`.
 *
 * # Safety
 *
 * `bundle` must be a live handle; `out` must be writable.
 */
enum OsStatus oraclesep_bundle_obf(const struct OsBundle *bundle,
                                   uint64_t c,
                                   uint64_t r,
                                   uint64_t *out);

/**
 * `Eval(ct, x)`; [`OsStatus::Bot`] when `ct` is not in the image of Obf.
 *
 * # Safety
 *
 * `bundle` must be a live handle; `out` must be writable.
 */
enum OsStatus oraclesep_bundle_eval(const struct OsBundle *bundle,
                                    uint64_t ct,
                                    uint64_t x,
                                    uint64_t *out);

/**
 * Runs a named suite (`ow2h`, `distances`, `bbbv`, `markov`, `abcd`,
 * `punc`, `qcol`, `csto`). `trials` of 0 picks the suite's default.
 *
 * # Safety
 *
 * `suite` must be a NUL-terminated string; `out` must be writable.
 */
enum OsStatus oraclesep_run_suite(const char *suite,
                                  uint64_t seed,
                                  uint32_t trials,
                                  struct OsReports **out);

/**
 * # Safety
 *
 * `reports` must be a live handle or NULL.
 */
size_t oraclesep_reports_len(const struct OsReports *reports);

/**
 * Number of rows that failed.
 *
 * # Safety
 *
 * `reports` must be a live handle or NULL.
 */
size_t oraclesep_reports_failures(const struct OsReports *reports);

/**
 * Copies row `index` into `out`.
 *
 * # Safety
 *
 * `reports` must be a live handle; `out` must be writable.
 */
enum OsStatus oraclesep_reports_get(const struct OsReports *reports,
                                    size_t index,
                                    struct OsSlackReport *out);

/**
 * Lemma id of row `index`, owned by the handle; NULL when out of range.
 *
 * # Safety
 *
 * `reports` must be a live handle or NULL.
 */
const char *oraclesep_reports_lemma_id(const struct OsReports *reports, size_t index);

/**
 * # Safety
 *
 * `reports` must be NULL or a handle from [`oraclesep_run_suite`] that has
 * not been freed.
 */
void oraclesep_reports_free(struct OsReports *reports);

/**
 * Runs `trials` plays of hybrid `hybrid` (1 to 4). `budget` is the query
 * budget of the search adversaries and is ignored by the others.
 *
 * # Safety
 *
 * `out` must be writable.
 */
enum OsStatus oraclesep_owp_experiment(uint32_t lambda,
                                       uint32_t hybrid,
                                       enum OsOwpAdversary adversary,
                                       uint32_t budget,
                                       uint64_t trials,
                                       uint64_t seed,
                                       struct OsOwpCounts *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORACLESEP_H */
