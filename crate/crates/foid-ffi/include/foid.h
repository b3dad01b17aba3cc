#ifndef FOID_H
#define FOID_H

/* Generated by cbindgen from crates/foid-ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FoidStatus {
  FOID_STATUS_OK = 0,
  /**
   * A proof was rejected or a counterexample was found.
   */
  FOID_STATUS_FAILED = 1,
  FOID_STATUS_PARSE_ERROR = 2,
  FOID_STATUS_NULL_ARGUMENT = 3,
  FOID_STATUS_INVALID_UTF8 = 4,
  FOID_STATUS_UNKNOWN_NAME = 5,
  /**
   * A search space exceeded its configured bound.
   */
  FOID_STATUS_LIMIT = 6,
  FOID_STATUS_INTERNAL = 7,
} FoidStatus;

typedef enum FoidSemantics {
  FOID_SEMANTICS_WF = 0,
  FOID_SEMANTICS_STABLE = 1,
} FoidSemantics;

typedef enum FoidOutcome {
  FOID_OUTCOME_NO_COUNTEREXAMPLE = 0,
  FOID_OUTCOME_COUNTEREXAMPLE = 1,
  /**
   * Some domain size exceeded the atom cap; smaller sizes were searched.
   */
  FOID_OUTCOME_ABORTED = 2,
} FoidOutcome;

/**
 * A parsed theory file.
 */
typedef struct FoidDocument FoidDocument;

/**
 * Result of checking every proof of a document.
 */
typedef struct FoidCheckSummary {
  size_t proofs;
  size_t failed;
  size_t warnings;
} FoidCheckSummary;

typedef struct FoidVerdict {
  enum FoidOutcome outcome;
  /**
   * Largest domain size searched exhaustively.
   */
  size_t tested;
  /**
   * Size of the counterexample or of the first aborted domain, else 0.
   */
  size_t size;
} FoidVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call.
 */
const char *foid_last_error(void);

/**
 * Parse a theory. `file` names the source in error messages and may be null.
 *
 * # Safety
 * `source` and `file` must be null or NUL-terminated; `out` must be writable.
 */
enum FoidStatus foid_document_parse(const char *source,
                                    const char *file,
                                    struct FoidDocument **out);

/**
 * # Safety
 * `doc` must be null or a handle from [`foid_document_parse`] not yet freed.
 */
void foid_document_free(struct FoidDocument *doc);

/**
 * Check every proof. Returns `Failed` when any proof is rejected; the
 * summary is filled in either way.
 *
 * # Safety
 * `doc` must be a live handle and `out` writable.
 */
enum FoidStatus foid_document_check(const struct FoidDocument *doc, struct FoidCheckSummary *out);

/**
 * Search for a counterexample to the named sequent over all structures with
 * at most `max_n` elements. A counterexample gives status `Failed`.
 *
 * # Safety
 * `doc` must be a live handle, `sequent` NUL-terminated, `out` writable.
 */
enum FoidStatus foid_validate(const struct FoidDocument *doc,
                              const char *sequent,
                              enum FoidSemantics semantics,
                              size_t max_n,
                              size_t cap,
                              struct FoidVerdict *out);

/**
 * Well-founded model of definition `def` over structure `context`, written
 * as text such as `Even: 0↦t, 1↦u`. `total` receives whether it is two-valued.
 *
 * # Safety
 * `doc` must be a live handle, names NUL-terminated, outputs writable.
 */
enum FoidStatus foid_wf_model(const struct FoidDocument *doc,
                              const char *def,
                              const char *context,
                              char **out,
                              bool *total);

/**
 * Number of stable models of `def` over `context`, enumerating at most
 * `cap` unknown atoms.
 *
 * # Safety
 * `doc` must be a live handle, names NUL-terminated, `count` writable.
 */
enum FoidStatus foid_stable_count(const struct FoidDocument *doc,
                                  const char *def,
                                  const char *context,
                                  size_t cap,
                                  size_t *count);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void foid_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOID_H */
