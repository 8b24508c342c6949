#ifndef MATRIXPROVE_H
#define MATRIXPROVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MpErrorCode {
  MP_ERROR_CODE_OK = 0,
  MP_ERROR_CODE_NULL_POINTER = 1,
  MP_ERROR_CODE_INVALID_UTF8 = 2,
  MP_ERROR_CODE_PARSE = 3,
  MP_ERROR_CODE_CERTIFICATE_REJECTED = 4,
  MP_ERROR_CODE_INTERNAL = 5,
} MpErrorCode;

typedef enum MpMode {
  MP_MODE_INTUITIONISTIC = 0,
  MP_MODE_CLASSICAL = 1,
} MpMode;

typedef enum MpStatus {
  MP_STATUS_THEOREM = 0,
  MP_STATUS_GAVE_UP = 1,
  MP_STATUS_TIMEOUT = 2,
  MP_STATUS_ERROR = 3,
} MpStatus;

// A parsed problem.
typedef struct MpProblem MpProblem;

// The outcome of `mp_prove`.
typedef struct MpResult MpResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses TPTP FOF text. On success `*out` holds a new problem handle.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum MpErrorCode mp_parse(const char *text, struct MpProblem **out);

// Searches for a proof and checks it. `timeout_ms` of 0 means no limit.
// The status is `MP_STATUS_THEOREM` only after the certificate and the
// sequent proof derived from it have both been checked.
//
// # Safety
// `problem` must come from `mp_parse` and `out` must be a valid pointer.
enum MpErrorCode mp_prove(const struct MpProblem *problem,
                          enum MpMode mode,
                          uint64_t timeout_ms,
                          uint32_t copy_cap,
                          struct MpResult **out);

// # Safety
// `result` must come from `mp_prove`.
enum MpStatus mp_result_status(const struct MpResult *result);

// The certificate JSON of a proved result, or NULL. Release the string
// with `mp_string_free`.
//
// # Safety
// `result` must come from `mp_prove`.
char *mp_result_certificate_json(const struct MpResult *result);

// Checks a certificate against a problem: `MP_ERROR_CODE_OK` when it is
// accepted and the sequent proof built from it checks too.
//
// # Safety
// `problem` must come from `mp_parse`; `json` must be NUL-terminated.
enum MpErrorCode mp_check_certificate(const struct MpProblem *problem,
                                      enum MpMode mode,
                                      const char *json);

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next library call on the same thread.
const char *mp_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, freed once.
void mp_string_free(char *s);

// # Safety
// `p` must be NULL or a handle from `mp_parse`, freed once.
void mp_problem_free(struct MpProblem *p);

// # Safety
// `r` must be NULL or a handle from `mp_prove`, freed once.
void mp_result_free(struct MpResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MATRIXPROVE_H */
