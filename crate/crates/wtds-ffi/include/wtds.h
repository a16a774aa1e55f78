#ifndef WTDS_H
#define WTDS_H

/* Generated by cbindgen from wtds-ffi/src/lib.rs; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call through the C ABI.
typedef enum {
  // Success; out-parameters have been written.
  WTDS_STATUS_OK = 0,
  // A required pointer argument was null.
  WTDS_STATUS_NULL_ARGUMENT = 1,
  // An input string was not valid UTF-8.
  WTDS_STATUS_INVALID_UTF8 = 2,
  // The instance text did not parse; see `wtds_last_error_message`.
  WTDS_STATUS_PARSE_ERROR = 3,
  // Kernelization failed on an invariant violation; see
  // `wtds_last_error_message`.
  WTDS_STATUS_KERNELIZE_ERROR = 4,
  // The instance exceeds the exhaustive-search limit passed to
  // `wtds_solve`.
  WTDS_STATUS_TOO_LARGE = 5,
  // An internal panic was caught at the ABI boundary.
  WTDS_STATUS_PANIC = 6,
} WtdsStatus;

// Opaque parsed instance handle.
typedef struct WtdsInstance WtdsInstance;

// Opaque kernelization result handle.
typedef struct WtdsReport WtdsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library as a static NUL-terminated string.
// The pointer is valid for the lifetime of the process; do not free it.
const char *wtds_version(void);

// Message describing the most recent failure on this thread, or null if the
// last call succeeded. Borrowed pointer: valid until the next wtds call on
// the same thread, never free it.
const char *wtds_last_error_message(void);

// Parses instance text (the `p wtds` format) into a new handle.
//
// On `Ok`, `*out` owns the instance; free it with `wtds_instance_free`.
//
// # Safety
//
// `text` must point to a NUL-terminated byte string and `out` to writable
// storage for one pointer.
WtdsStatus wtds_instance_parse(const char *text, WtdsInstance **out);

// Releases an instance handle. Null is a no-op.
//
// # Safety
//
// `inst` must be null or a pointer obtained from `wtds_instance_parse` that
// has not been freed yet.
void wtds_instance_free(WtdsInstance *inst);

// Runs the kernelization pipeline on a parsed instance.
//
// On `Ok`, `*out` owns the report; free it with `wtds_report_free`. The
// instance handle remains owned by the caller and is still usable.
//
// # Safety
//
// `inst` must be a live handle from `wtds_instance_parse`; `out` must point
// to writable storage for one pointer.
WtdsStatus wtds_kernelize(const WtdsInstance *inst, WtdsReport **out);

// Serializes the kernel instance to text (ids renumbered to `1..=n`, with
// `c map` comment lines recording the original ids).
//
// On `Ok`, `*out` owns the string; free it with `wtds_string_free`.
//
// # Safety
//
// `rep` must be a live handle from `wtds_kernelize`; `out` must point to
// writable storage for one pointer.
WtdsStatus wtds_report_kernel_text(const WtdsReport *rep, char **out);

// Serializes the full kernelization report (sizes, decision, bound ledger,
// rule trace) as pretty-printed JSON.
//
// On `Ok`, `*out` owns the string; free it with `wtds_string_free`.
//
// # Safety
//
// `rep` must be a live handle from `wtds_kernelize`; `out` must point to
// writable storage for one pointer.
WtdsStatus wtds_report_json(const WtdsReport *rep, char **out);

// Decision recorded in a report: `1` if the pipeline already decided YES,
// `0` for NO, `-1` if it produced an undecided kernel, `-2` if `rep` is
// null.
//
// # Safety
//
// `rep` must be null or a live handle from `wtds_kernelize`.
int wtds_report_decided(const WtdsReport *rep);

// Releases a report handle. Null is a no-op.
//
// # Safety
//
// `rep` must be null or a pointer obtained from `wtds_kernelize` that has
// not been freed yet.
void wtds_report_free(WtdsReport *rep);

// Decides an instance exactly by exhaustive search, capped at
// `oracle_limit` vertices (the search is exponential; keep the limit small).
//
// On `Ok`, writes `1` (YES) or `0` (NO) to `*decision_out`. Returns
// `TooLarge` when the instance has more than `oracle_limit` vertices.
//
// # Safety
//
// `inst` must be a live handle from `wtds_instance_parse`; `decision_out`
// must point to writable storage for one `int`.
WtdsStatus wtds_solve(const WtdsInstance *inst, size_t oracle_limit, int *decision_out);

// Releases a string returned by this library. Null is a no-op.
//
// # Safety
//
// `s` must be null or a pointer obtained from a wtds function that
// documents `wtds_string_free` as its deallocator, not freed yet.
void wtds_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WTDS_H */
