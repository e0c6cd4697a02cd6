/* SPDX-License-Identifier: MIT OR Apache-2.0 */

#ifndef QIPL_LAB_H
#define QIPL_LAB_H

/* Generated by cbindgen from crates/qipl-lab-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every exported call.
 */
typedef enum QiplStatus {
  QIPL_STATUS_OK = 0,
  QIPL_STATUS_NULL_POINTER = 1,
  QIPL_STATUS_INVALID_UTF8 = 2,
  /**
   * Input text could not be parsed.
   */
  QIPL_STATUS_PARSE = 3,
  /**
   * Input parsed but violates a precondition.
   */
  QIPL_STATUS_INVALID = 4,
  /**
   * A computation failed, for example a solver did not converge.
   */
  QIPL_STATUS_COMPUTE = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  QIPL_STATUS_PANIC = 6,
} QiplStatus;

/**
 * Verdict of [`qipl_decide_indivprod`].
 */
typedef enum QiplVerdict {
  QIPL_VERDICT_YES = 0,
  QIPL_VERDICT_NO = 1,
  QIPL_VERDICT_PROMISE_VIOLATION = 2,
} QiplVerdict;

/**
 * Opaque verifier handle.
 */
typedef struct QiplVerifier QiplVerifier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library from this thread.
 */
const char *qipl_last_error(void);

/**
 * Library version as a static string.
 */
const char *qipl_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer returned by this library and not yet
 * freed.
 */
void qipl_string_free(char *s);

/**
 * Parses a verifier from JSON into a new handle stored in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QiplStatus qipl_verifier_from_json(const char *json, struct QiplVerifier **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `v` must be NULL or a handle from this library that is not used again.
 */
void qipl_verifier_free(struct QiplVerifier *v);

/**
 * Serializes a verifier; free the result with [`qipl_string_free`].
 *
 * # Safety
 * `v` must be a live handle and `out` a writable pointer.
 */
enum QiplStatus qipl_verifier_to_json(const struct QiplVerifier *v, char **out);

/**
 * Total verifier register size `q_M + q_W`.
 *
 * # Safety
 * `v` must be a live handle and `out` a writable pointer.
 */
enum QiplStatus qipl_verifier_num_qubits(const struct QiplVerifier *v, size_t *out);

/**
 * Number of messages exchanged.
 *
 * # Safety
 * `v` must be a live handle and `out` a writable pointer.
 */
enum QiplStatus qipl_verifier_num_turns(const struct QiplVerifier *v, size_t *out);

/**
 * Optimal acceptance probability, solved to duality gap `tol`.
 *
 * # Safety
 * `v` must be a live handle and `out` a writable pointer.
 */
enum QiplStatus qipl_verifier_omega(const struct QiplVerifier *v, double tol, double *out);

/**
 * Applies one transform stage, written `name[:key=value,...]` as on the
 * command line, and stores the result in a new handle.
 *
 * # Safety
 * `v` must be a live handle, `stage` a NUL-terminated string and `out` a
 * writable pointer.
 */
enum QiplStatus qipl_verifier_transform(const struct QiplVerifier *v,
                                        const char *stage,
                                        struct QiplVerifier **out);

/**
 * Decides an instance given as JSON. On a yes verdict `*witness` is the
 * index of a far pair; otherwise it is left unchanged.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `verdict` and `witness` must be
 * writable pointers.
 */
enum QiplStatus qipl_decide_indivprod(const char *json, enum QiplVerdict *verdict, size_t *witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QIPL_LAB_H */
