#ifndef UNRAMIFIED_H
#define UNRAMIFIED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; the numeric values match the CLI exit codes where they overlap.
 */
typedef enum UnrStatus {
  UNR_STATUS_OK = 0,
  UNR_STATUS_INVALID_INPUT = 1,
  UNR_STATUS_VERIFICATION_FAILED = 2,
  UNR_STATUS_GUARD_EXCEEDED = 3,
  UNR_STATUS_INTERNAL = 4,
  UNR_STATUS_NULL_POINTER = 5,
} UnrStatus;

/**
 * Opaque analysis report.
 */
typedef struct UnrReport UnrReport;

/**
 * Opaque group spec.
 */
typedef struct UnrSpec UnrSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a spec from JSON. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UnrStatus unr_spec_from_json(const char *json, struct UnrSpec **out);

/**
 * Looks up a builtin spec by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum UnrStatus unr_spec_from_builtin(const char *name, struct UnrSpec **out);

/**
 * # Safety
 * `spec` must come from this library and not be used afterwards. Null is ignored.
 */
void unr_spec_free(struct UnrSpec *spec);

/**
 * Serializes a spec back to JSON.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_spec_to_json(const struct UnrSpec *spec, char **out);

/**
 * Runs the obstruction analysis.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_analyze(const struct UnrSpec *spec, bool strict, struct UnrReport **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards. Null is ignored.
 */
void unr_report_free(struct UnrReport *report);

/**
 * `dim K²_max − dim K²`, or `SIZE_MAX` for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t unr_report_b0_dim(const struct UnrReport *report);

/**
 * `dim K³_max − dim K³`, or `SIZE_MAX` for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t unr_report_h3_dim(const struct UnrReport *report);

/**
 * Whether the spec satisfied the hypotheses (surjective γ, trivial radical).
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool unr_report_hypotheses_ok(const struct UnrReport *report);

/**
 * The verdict sentence.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_report_verdict(const struct UnrReport *report, char **out);

/**
 * The full report as JSON.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_report_to_json(const struct UnrReport *report, char **out);

/**
 * Runs every cochain identity check; `*out` receives the results as JSON.
 * Returns `VerificationFailed` when some identity fails.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_verify_lemmas(const struct UnrSpec *spec, uint64_t seed, char **out);

/**
 * Bar-complex cohomology orders up to `degree` with coefficients `Z/|G|`,
 * as JSON.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum UnrStatus unr_cohomology_orders(const struct UnrSpec *spec,
                                     size_t degree,
                                     bool allow_heavy,
                                     char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void unr_string_free(char *s);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *unr_last_error(void);

/**
 * Library version, a static string.
 */
const char *unr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNRAMIFIED_H */
