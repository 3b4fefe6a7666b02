#ifndef REFARRAY_H
#define REFARRAY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RaStatus {
  RA_STATUS_OK = 0,
  RA_STATUS_NULL_POINTER = 1,
  RA_STATUS_INVALID_ARGUMENT = 2,
  RA_STATUS_INVALID_GEOMETRY = 3,
  RA_STATUS_INFEASIBLE = 4,
  /**
   * The capacity bound's denominator is not positive.
   */
  RA_STATUS_BOUND_INVALID = 5,
  RA_STATUS_BUDGET_EXCEEDED = 6,
  RA_STATUS_PANIC = 7,
} RaStatus;

typedef enum RaObjective {
  /**
   * Feasibility-gated transport capacity.
   */
  RA_OBJECTIVE_TRANSPORT_CAPACITY = 0,
  RA_OBJECTIVE_MIN_SINR = 1,
  /**
   * SINR of the link given by `link`.
   */
  RA_OBJECTIVE_SINGLE_LINK_SINR = 2,
} RaObjective;

/**
 * Opaque scenario handle.
 */
typedef struct RaScenario RaScenario;

typedef struct RaPoint {
  double x;
  double y;
} RaPoint;

/**
 * Wall normal codes: 0 = +x, 1 = -x, 2 = +y, 3 = -y.
 */
typedef struct RaArrayLayout {
  struct RaPoint center;
  uint32_t wall_normal;
  size_t element_count;
  double element_spacing;
} RaArrayLayout;

/**
 * Linear link constants; powers in milliwatts.
 */
typedef struct RaLinkParams {
  double carrier_hz;
  double path_loss_exponent;
  double tx_power_mw;
  double noise_power_mw;
  double sinr_threshold;
  double rate_bps;
} RaLinkParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a scenario. Positions must be grid points of the room.
 *
 * # Safety
 * `layouts` must point to `n_layouts` values (or be null when zero); `tx` and
 * `rx` must each point to `pairs` points; `params` and `out` must be valid.
 */
enum RaStatus ra_scenario_new(double edge_length,
                              uint32_t grid_divisions,
                              const struct RaArrayLayout *layouts,
                              size_t n_layouts,
                              const struct RaPoint *tx,
                              const struct RaPoint *rx,
                              size_t pairs,
                              const struct RaLinkParams *params,
                              struct RaScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `scenario` must come from [`ra_scenario_new`] and not have been freed.
 */
void ra_scenario_free(struct RaScenario *scenario);

/**
 * Number of links, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t ra_scenario_pairs(const struct RaScenario *scenario);

/**
 * Pooled reflector element count, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t ra_scenario_element_count(const struct RaScenario *scenario);

/**
 * Linear SINR of zero-based link `link` under the given element phases.
 *
 * # Safety
 * `phases` must point to `n_phases` values; `out` must be writable.
 */
enum RaStatus ra_sinr(const struct RaScenario *scenario,
                      const double *phases,
                      size_t n_phases,
                      size_t link,
                      double *out);

/**
 * Transport capacity (0 unless every link is feasible) and the feasibility flag.
 *
 * # Safety
 * `phases` must point to `n_phases` values; `capacity` and `feasible` must be writable.
 */
enum RaStatus ra_transport_capacity(const struct RaScenario *scenario,
                                    const double *phases,
                                    size_t n_phases,
                                    double *capacity,
                                    bool *feasible);

/**
 * Closed-form capacity bound. Returns `RA_STATUS_BOUND_INVALID` and leaves
 * `out` untouched when the bound is vacuous.
 *
 * # Safety
 * `params` must be valid and `out` writable.
 */
enum RaStatus ra_upper_bound(const struct RaLinkParams *params,
                             size_t pairs,
                             size_t elements,
                             double d_min,
                             double d_max,
                             double *out);

/**
 * Coordinate ascent over a phase grid of step `phase_step` radians.
 *
 * Writes the element phases into `out_phases` (capacity `n_out`, which must
 * equal the element count) and the objective value into `value`.
 *
 * # Safety
 * `out_phases` must point to `n_out` writable values and `value` must be writable.
 */
enum RaStatus ra_optimize_phases(const struct RaScenario *scenario,
                                 enum RaObjective objective,
                                 size_t link,
                                 double phase_step,
                                 size_t max_sweeps,
                                 double *out_phases,
                                 size_t n_out,
                                 double *value);

/**
 * Message of the last failing call on this thread, or null if none.
 * Valid until the next failing call on the same thread.
 */
const char *ra_last_error(void);

/**
 * Static name of a status code.
 */
const char *ra_status_name(enum RaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REFARRAY_H */
