#ifndef GUARDSIM_H
#define GUARDSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_ARGUMENT = 1,
  GS_STATUS_INVALID_UTF8 = 2,
  /**
   * The vertex ring is not a simple polygon.
   */
  GS_STATUS_INVALID_POLYGON = 3,
  /**
   * Malformed JSON or schema.
   */
  GS_STATUS_INVALID_FORMAT = 4,
  GS_STATUS_INVALID_CONFIG = 5,
  /**
   * Partitioning or deployment failed.
   */
  GS_STATUS_DEPLOY_FAILED = 6,
  GS_STATUS_PANIC = 7,
} GsStatus;

/**
 * Deployment plan handle.
 */
typedef struct GsPlan GsPlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *gs_last_error(void);

const char *gs_version(void);

/**
 * Deploys guards for a polygon file (JSON text) against intruder speed `ve`.
 *
 * # Safety
 * `polygon_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_plan_from_polygon_json(const char *polygon_json, double ve, struct GsPlan **out);

/**
 * Loads a plan file (JSON text), checking its digest.
 *
 * # Safety
 * `plan_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_plan_from_plan_json(const char *plan_json, struct GsPlan **out);

/**
 * Canonical plan file text; release it with [`gs_string_free`].
 *
 * # Safety
 * `plan` must come from this library and `out` be a valid pointer.
 */
enum GsStatus gs_plan_to_json(const struct GsPlan *plan, char **out);

/**
 * Number of guards in the plan; 0 for a null handle.
 *
 * # Safety
 * `plan` must be null or come from this library.
 */
size_t gs_plan_guard_total(const struct GsPlan *plan);

/**
 * Guard budget the plan is held to; 0 for a null handle.
 *
 * # Safety
 * `plan` must be null or come from this library.
 */
size_t gs_plan_bound(const struct GsPlan *plan);

/**
 * Guard speed the plan needs; NaN for a null handle.
 *
 * # Safety
 * `plan` must be null or come from this library.
 */
double gs_plan_v_star(const struct GsPlan *plan);

/**
 * # Safety
 * `plan` must be null or come from this library, and not be used again.
 */
void gs_plan_free(struct GsPlan *plan);

/**
 * Runs `steps` steps of an intruder policy against the plan. `policy_json`
 * is a policy object such as `{"kind":"greedy_escape"}`; a NaN `vp` means the
 * plan's required speed. The breach count goes to `breaches`, and the trace
 * as JSON lines to `trace` when it is not null.
 *
 * # Safety
 * Pointers must be valid; `trace` may be null.
 */
enum GsStatus gs_simulate(const struct GsPlan *plan,
                          const char *policy_json,
                          uint64_t steps,
                          uint64_t seed,
                          double vp,
                          size_t *breaches,
                          char **trace);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void gs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GUARDSIM_H */
