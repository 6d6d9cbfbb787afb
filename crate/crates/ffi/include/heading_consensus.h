#ifndef HEADING_CONSENSUS_H
#define HEADING_CONSENSUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_UTF8 = 2,
  HC_STATUS_PARSE_ERROR = 3,
  HC_STATUS_INVALID_SCENARIO = 4,
  HC_STATUS_INVALID_PARAMETER = 5,
  HC_STATUS_SINGULAR_GEOMETRY = 6,
  HC_STATUS_INDEX_OUT_OF_RANGE = 7,
  HC_STATUS_BUFFER_TOO_SMALL = 8,
  HC_STATUS_NOT_AVAILABLE = 9,
  HC_STATUS_PANIC = 10,
} HcStatus;

/**
 * Convergence metrics of a trajectory.
 */
typedef struct HcReport HcReport;

/**
 * A validated scenario.
 */
typedef struct HcScenario HcScenario;

/**
 * A recorded simulation.
 */
typedef struct HcTrajectory HcTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or null. The
 * pointer stays valid until the next `hc_*` call on the same thread.
 */
const char *hc_last_error_message(void);

/**
 * Parses and validates a JSON scenario document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HcStatus hc_scenario_from_json(const char *json, struct HcScenario **out);

/**
 * Loads one of `hexagon`, `hexagon-misdirected`, `torricelli`, `torricelli-misdirected`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HcStatus hc_scenario_builtin(const char *name, struct HcScenario **out);

/**
 * Copy of `scenario` with initial headings drawn from `seed`.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_scenario_reseed(const struct HcScenario *scenario,
                                 uint64_t seed,
                                 struct HcScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void hc_scenario_free(struct HcScenario *scenario);

/**
 * Number of agents, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t hc_scenario_agent_count(const struct HcScenario *scenario);

/**
 * Seed the initial headings were drawn from; `NotAvailable` when they were given explicitly.
 *
 * # Safety
 * `scenario` must be a live handle and `seed` a valid pointer.
 */
enum HcStatus hc_scenario_seed(const struct HcScenario *scenario, uint64_t *seed);

/**
 * Writes the common target implied by the set points. Fails with
 * `InvalidScenario` when no common target exists.
 *
 * # Safety
 * `scenario` must be a live handle; `x` and `y` valid pointers.
 */
enum HcStatus hc_scenario_target(const struct HcScenario *scenario, double *x, double *y);

/**
 * Hex SHA-256 of the scenario's explicit form. Free with [`hc_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_scenario_hash(const struct HcScenario *scenario, char **out);

/**
 * Integrates in the global frame.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_simulate(const struct HcScenario *scenario,
                          double dt,
                          double t_final,
                          size_t record_every,
                          struct HcTrajectory **out);

/**
 * Integrates with each agent working in its own frame, rotated by
 * `frame_angles[k]` radians for agent `k + 1`. `count` must equal the agent count.
 *
 * # Safety
 * `frame_angles` must point to `count` doubles; other pointers as for [`hc_simulate`].
 */
enum HcStatus hc_simulate_local_frame(const struct HcScenario *scenario,
                                      const double *frame_angles,
                                      size_t count,
                                      double dt,
                                      double t_final,
                                      size_t record_every,
                                      struct HcTrajectory **out);

/**
 * # Safety
 * `trajectory` must be null or a handle not yet freed.
 */
void hc_trajectory_free(struct HcTrajectory *trajectory);

/**
 * Number of recorded samples, or 0 for a null handle.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t hc_trajectory_sample_count(const struct HcTrajectory *trajectory);

/**
 * Time and headings of sample `index`. `headings` receives
 * `x1, y1, x2, y2, ...` and must hold `2 * agent_count` doubles.
 *
 * # Safety
 * `trajectory` must be a live handle, `time` valid, and `headings` must
 * point to `len` writable doubles.
 */
enum HcStatus hc_trajectory_sample(const struct HcTrajectory *trajectory,
                                   size_t index,
                                   double *time,
                                   double *headings,
                                   size_t len);

/**
 * Analyzes a trajectory. Non-positive tolerances select the defaults (1e-4).
 *
 * # Safety
 * `trajectory` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_analyze(const struct HcTrajectory *trajectory,
                         double tol_angle,
                         double tol_residual,
                         struct HcReport **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void hc_report_free(struct HcReport *report);

/**
 * Final verdicts.
 *
 * # Safety
 * `report` must be a live handle; the flag pointers valid.
 */
enum HcStatus hc_report_verdicts(const struct HcReport *report,
                                 bool *consensus,
                                 bool *angles_satisfied,
                                 bool *forward_pointing);

/**
 * Least-squares intersection of the final heading lines and its RMS
 * residual. `NotAvailable` when every heading is parallel.
 *
 * # Safety
 * `report` must be a live handle; `x`, `y`, `residual` valid pointers.
 */
enum HcStatus hc_report_intersection(const struct HcReport *report,
                                     double *x,
                                     double *y,
                                     double *residual);

/**
 * Largest final edge error and the final root error.
 *
 * # Safety
 * `report` must be a live handle; outputs valid pointers.
 */
enum HcStatus hc_report_final_errors(const struct HcReport *report,
                                     double *max_edge_error,
                                     double *root_error);

/**
 * Full report, series included, as JSON. Free with [`hc_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum HcStatus hc_report_to_json(const struct HcReport *report, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void hc_string_free(char *s);

/**
 * Intersection of the lines `(p1x, p1y) + s (b1x, b1y)` and
 * `(p2x, p2y) + s (b2x, b2y)`. Headings are normalized first.
 *
 * # Safety
 * `x` and `y` must be valid pointers.
 */
enum HcStatus hc_recover_target(double p1x,
                                double p1y,
                                double b1x,
                                double b1y,
                                double p2x,
                                double p2y,
                                double b2x,
                                double b2y,
                                double *x,
                                double *y);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEADING_CONSENSUS_H */
