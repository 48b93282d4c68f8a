#ifndef RETCACHE_H
#define RETCACHE_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  RC_STATUS_PARSE = 3,
  RC_STATUS_VALIDATION = 4,
  RC_STATUS_DOMAIN = 5,
  RC_STATUS_SEARCH_SPACE_TOO_LARGE = 6,
  RC_STATUS_IO = 7,
  RC_STATUS_BUFFER_TOO_SMALL = 8,
  RC_STATUS_PANIC = 9,
} RcStatus;

/*
 Contact model for [`retcache_simulate`].
 */
typedef enum RcContactMode {
  RC_CONTACT_MODE_BERNOULLI = 0,
  RC_CONTACT_MODE_POISSON_COUNT = 1,
} RcContactMode;

/*
 A caching plan with its cost report.
 */
typedef struct RcPlan RcPlan;

/*
 A validated scenario with its demand.
 */
typedef struct RcScenario RcScenario;

/*
 Monte Carlo summary. `z_score` is NaN when `standard_error` is zero.
 */
typedef struct RcSimResult {
  uint64_t trials;
  uint64_t seed;
  double empirical_download_cost;
  double standard_error;
  double analytic_download_cost;
  double analytic_storage_cost;
  double z_score;
} RcSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Scenario with every parameter at its default.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum RcStatus retcache_scenario_default(struct RcScenario **out);

/*
 Scenario parsed from a JSON config.

 # Safety
 `json` must be a NUL-terminated string and `out` valid for writing one
 pointer.
 */
enum RcStatus retcache_scenario_from_json(const char *json, struct RcScenario **out);

/*
 # Safety
 `scenario` must come from this library and not be used afterwards. Null
 is ignored.
 */
void retcache_scenario_free(struct RcScenario *scenario);

/*
 Library size, horizon, fleet size and per-slot capacity. Any output
 pointer may be null.

 # Safety
 `scenario` must be a live handle; non-null outputs must be writable.
 */
enum RcStatus retcache_scenario_dims(const struct RcScenario *scenario,
                                     size_t *num_contents,
                                     size_t *num_slots,
                                     uint32_t *num_helpers,
                                     uint32_t *total_capacity);

/*
 Globally optimal plan.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
enum RcStatus retcache_plan_optimal(const struct RcScenario *scenario, struct RcPlan **out);

/*
 Popular-caching baseline plan.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
enum RcStatus retcache_plan_popular(const struct RcScenario *scenario, struct RcPlan **out);

/*
 Random-caching baseline plan for `seed`.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
enum RcStatus retcache_plan_random(const struct RcScenario *scenario,
                                   uint64_t seed,
                                   struct RcPlan **out);

/*
 # Safety
 `plan` must come from this library and not be used afterwards. Null is
 ignored.
 */
void retcache_plan_free(struct RcPlan *plan);

/*
 Total cost and its download and storage parts.

 # Safety
 `plan` must be a live handle; all three outputs must be writable.
 */
enum RcStatus retcache_plan_costs(const struct RcPlan *plan,
                                  double *total,
                                  double *download,
                                  double *storage);

/*
 # Safety
 `plan` must be a live handle; both outputs must be writable.
 */
enum RcStatus retcache_plan_dims(const struct RcPlan *plan,
                                 size_t *num_contents,
                                 size_t *num_slots);

/*
 Copies the helper-count matrix row-major into `buffer`, which must hold
 at least `num_contents * num_slots` entries.

 # Safety
 `plan` must be a live handle and `buffer` writable for `len` entries.
 */
enum RcStatus retcache_plan_copy_matrix(const struct RcPlan *plan, uint32_t *buffer, size_t len);

/*
 Full JSON report. Release the string with [`retcache_string_free`].

 # Safety
 `plan` must be a live handle and `out` writable.
 */
enum RcStatus retcache_plan_report_json(const struct RcPlan *plan, char **out);

/*
 # Safety
 `s` must come from this library and not be used afterwards. Null is
 ignored.
 */
void retcache_string_free(char *s);

/*
 Monte Carlo estimate of the plan's download cost under the scenario.

 # Safety
 Both handles must be live and `out` writable.
 */
enum RcStatus retcache_simulate(const struct RcScenario *scenario,
                                const struct RcPlan *plan,
                                uint64_t trials,
                                uint64_t seed,
                                enum RcContactMode mode,
                                struct RcSimResult *out);

/*
 Optimal cost from the planner and from exhaustive search. Returns
 `SEARCH_SPACE_TOO_LARGE` when the instance is beyond the oracle's limit.

 # Safety
 `scenario` must be a live handle; outputs must be writable.
 */
enum RcStatus retcache_verify(const struct RcScenario *scenario,
                              double *dp_cost,
                              double *oracle_cost);

/*
 Message of the last failure on this thread, or null. Valid until the next
 failing call on the same thread; do not free.
 */
const char *retcache_last_error_message(void);

/*
 Static name of a status code; do not free.
 */
const char *retcache_status_name(enum RcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RETCACHE_H */
