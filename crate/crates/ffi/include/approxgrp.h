#ifndef APPROXGRP_H
#define APPROXGRP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AgStatus {
  AG_STATUS_OK = 0,
  AG_STATUS_NULL_POINTER = 1,
  AG_STATUS_INVALID_UTF8 = 2,
  AG_STATUS_INVALID_JSON = 3,
  AG_STATUS_STRUCTURAL = 4,
  AG_STATUS_CAPABILITY = 5,
  AG_STATUS_DOMAIN = 6,
  AG_STATUS_PARAMETER = 7,
  AG_STATUS_COVERAGE = 8,
  AG_STATUS_SEPARATION = 9,
  AG_STATUS_FOLNER = 10,
  AG_STATUS_SCHEMA = 11,
  AG_STATUS_PANIC = 12,
} AgStatus;

/**
 * Report rendering for [`ag_run_scenario`].
 */
typedef enum AgFormat {
  AG_FORMAT_TEXT = 0,
  AG_FORMAT_MACHINE = 1,
} AgFormat;

/**
 * Opaque group handle.
 */
typedef struct AgGroup AgGroup;

/**
 * Opaque length-function handle.
 */
typedef struct AgLength AgLength;

/**
 * Optional overrides for [`ag_run_scenario`]. Zero budget or samples keeps
 * the scenario's value; the seed applies only when `use_seed` is set.
 */
typedef struct AgOverrides {
  uint64_t budget;
  uint64_t samples;
  uint64_t seed;
  bool use_seed;
} AgOverrides;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a group from a JSON descriptor such as `{"kind":"sym","n":4}`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` writable.
 */
enum AgStatus ag_group_from_json(const char *json, struct AgGroup **out);

/**
 * Releases a group handle. Null is ignored.
 *
 * # Safety
 * `group` must come from [`ag_group_from_json`] and not be used afterwards.
 */
void ag_group_free(struct AgGroup *group);

/**
 * Writes the group order to `out` and whether the group is finite to
 * `finite`. Infinite groups report order 0; finite orders above `u64`
 * fail with [`AgStatus::Capability`].
 *
 * # Safety
 * `group` must be a live handle; `out` and `finite` writable.
 */
enum AgStatus ag_group_order(const struct AgGroup *group, uint64_t *out, bool *finite);

/**
 * Multiplies two JSON-encoded elements; the product is written to `out`
 * as JSON.
 *
 * # Safety
 * `group` must be a live handle, `a` and `b` valid strings, `out` writable.
 */
enum AgStatus ag_group_multiply(const struct AgGroup *group,
                                const char *a,
                                const char *b,
                                char **out);

/**
 * Builds a length function from a JSON descriptor such as
 * `{"kind":"hamming"}`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` writable.
 */
enum AgStatus ag_length_from_json(const char *json, struct AgLength **out);

/**
 * Releases a length handle. Null is ignored.
 *
 * # Safety
 * `length` must come from [`ag_length_from_json`] and not be used afterwards.
 */
void ag_length_free(struct AgLength *length);

/**
 * Evaluates a length on a JSON-encoded element of `group`.
 *
 * # Safety
 * Both handles must be live, `element` a valid string, `out` writable.
 */
enum AgStatus ag_length_evaluate(const struct AgLength *length,
                                 const struct AgGroup *group,
                                 const char *element,
                                 double *out);

/**
 * Runs a scenario document. On success the rendered report goes to
 * `report` and whether every verdict held goes to `passed`. Bound
 * violations are not errors: they come back as `Ok` with `passed` false.
 *
 * # Safety
 * `scenario` must be a valid string, `overrides` null or readable, and
 * `report` and `passed` writable.
 */
enum AgStatus ag_run_scenario(const char *scenario,
                              const struct AgOverrides *overrides,
                              enum AgFormat format,
                              char **report,
                              bool *passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ag_string_free(char *s);

/**
 * Message for the most recent failure on this thread, or null after a
 * successful call. The pointer stays valid until the next call on the
 * same thread.
 */
const char *ag_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ag_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APPROXGRP_H */
