#ifndef REEBCHECK_H
#define REEBCHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `RC_OK` is zero.
 */
typedef enum RcStatus {
  RC_OK = 0,
  RC_NULL_POINTER = 1,
  RC_INVALID_INPUT = 2,
  RC_UNKNOWN_ENTRY = 3,
  RC_EXPRESSION = 4,
  RC_OUT_OF_CHART = 5,
  RC_SINGULAR_METRIC = 6,
  RC_NOT_UNIT = 7,
  RC_DEGENERATE = 8,
  RC_STEP_TOO_LARGE = 9,
  RC_POLE_REACHED = 10,
  RC_NO_PARAMETRIZATION = 11,
  RC_NOT_CONSTANT_CURVATURE = 12,
  RC_NOT_FOUND = 13,
  RC_PANIC = 99,
} RcStatus;

/**
 * Opaque catalog or custom entry.
 */
typedef struct RcEntry RcEntry;

/**
 * Opaque integrated orbit.
 */
typedef struct RcTrajectory RcTrajectory;

/**
 * Per-point diagnosis.
 */
typedef struct RcDiagnosis {
  double p[3];
  double unit_defect;
  double geodesic_defect;
  double killing_defect;
  double contact_defect;
  /**
   * 0 for a real pair, 1 for a complex pair.
   */
  uint32_t eig_kind;
  /**
   * `re1, im1, re2, im2`
   */
  double eig[4];
  double ric_x;
  double delta_max;
  double delta_min;
  uint32_t beta_rank;
  /**
   * Row-major `β` in the orthonormal frame.
   */
  double beta[4];
} RcDiagnosis;

/**
 * One orbit sample.
 */
typedef struct RcOrbitSample {
  double t;
  double p[3];
  /**
   * Row-major `β` in the transported frame.
   */
  double beta[4];
  double contact_defect;
  /**
   * `J` and `J̃` components in the transported frame.
   */
  double j[4];
  double wronskian;
} RcOrbitSample;

/**
 * Residuals and flags of an orbit.
 */
typedef struct RcResiduals {
  double riccati;
  double trace;
  double adapted;
  double wronskian;
  double wronskian_relative;
  /**
   * Nonzero when the orbit left the chart before `t_end`.
   */
  uint32_t truncated;
} RcResiduals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version; static storage.
 */
const char *rc_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *rc_last_error_message(void);

size_t rc_catalog_count(void);

/**
 * Name of catalog entry `index`; static storage, or null when out of range.
 */
const char *rc_catalog_name(size_t index);

/**
 * Look up a catalog entry by name, e.g. `"h3_vertical"` or `"s3_weighted(2,3)"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum RcStatus rc_entry_builtin(const char *name, struct RcEntry **out);

/**
 * Custom entry from expressions: `metric_upper` holds `g11, g12, g13, g22, g23, g33`,
 * `field` the three components, and `domain` is null for the whole chart or an
 * expression that must be positive.
 *
 * # Safety
 * `metric_upper` must point to 6 and `field` to 3 NUL-terminated strings.
 */
enum RcStatus rc_entry_custom(const char *const *metric_upper,
                              const char *domain,
                              const char *const *field,
                              struct RcEntry **out);

/**
 * # Safety
 * `entry` must come from an `rc_entry_*` constructor and not be used afterwards.
 */
void rc_entry_free(struct RcEntry *entry);

/**
 * Diagnose the entry's field at chart point `p` (3 doubles).
 *
 * # Safety
 * Pointers must be valid; `out` writable.
 */
enum RcStatus rc_diagnose(const struct RcEntry *entry, const double *p, struct RcDiagnosis *out);

/**
 * Integrate the orbit from `start` (3 doubles) to `t_end` with fixed step `step`.
 *
 * # Safety
 * Pointers must be valid; `out` writable.
 */
enum RcStatus rc_orbit(const struct RcEntry *entry,
                       const double *start,
                       double t_end,
                       double step,
                       struct RcTrajectory **out);

/**
 * # Safety
 * `traj` must come from [`rc_orbit`] and not be used afterwards.
 */
void rc_trajectory_free(struct RcTrajectory *traj);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or valid.
 */
size_t rc_trajectory_len(const struct RcTrajectory *traj);

/**
 * # Safety
 * Pointers must be valid; `out` writable.
 */
enum RcStatus rc_trajectory_sample(const struct RcTrajectory *traj,
                                   size_t index,
                                   struct RcOrbitSample *out);

/**
 * # Safety
 * Pointers must be valid; `out` writable.
 */
enum RcStatus rc_trajectory_residuals(const struct RcTrajectory *traj, struct RcResiduals *out);

/**
 * Contact volume with `nodes` midpoint nodes per axis, and its refinement error.
 *
 * # Safety
 * Pointers must be valid; outputs writable.
 */
enum RcStatus rc_volume(const struct RcEntry *entry,
                        size_t nodes,
                        double *value,
                        double *estimated_error);

/**
 * First positive zero of `j'' + c j = 0`, `j(0) = 1`, `j'(0) = λ`; `RC_NOT_FOUND` when none.
 *
 * # Safety
 * `out` must be writable.
 */
enum RcStatus rc_first_zero_space_form(double c, double lambda, double *out);

/**
 * `f(t) = (t/2 + 1/f0)⁻¹`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RcStatus rc_trace_comparison(double f0, double t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REEBCHECK_H */
