#ifndef SPINBOSON_H
#define SPINBOSON_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `partition_mask` value selecting all six partitions in [`sb_sweep_run`].
 */
#define SB_PARTITION_ALL 63

typedef enum {
  SB_FAMILY_TWO_EXCITATION = 0,
  SB_FAMILY_ONE_EXCITATION = 1,
} SbFamily;

typedef enum {
  SB_METHOD_CLOSED = 0,
  SB_METHOD_BRUTE = 1,
} SbMethod;

typedef enum {
  SB_PARTITION_S1S2 = 0,
  SB_PARTITION_R1R2 = 1,
  SB_PARTITION_S1R1 = 2,
  SB_PARTITION_S1R2 = 3,
  SB_PARTITION_S2R1 = 4,
  SB_PARTITION_S2R2 = 5,
} SbPartition;

typedef enum {
  SB_PIPELINE_CLOSED = 0,
  SB_PIPELINE_BRUTE = 1,
  SB_PIPELINE_BOTH = 2,
} SbPipeline;

typedef enum {
  SB_SIDE_FIRST = 0,
  SB_SIDE_SECOND = 1,
} SbSide;

typedef enum {
  /**
   * `param1` = γ, `param2` unused.
   */
  SB_SPECTRUM_FLAT = 0,
  /**
   * `param1` = W, `param2` = λ.
   */
  SB_SPECTRUM_LORENTZ = 1,
} SbSpectrum;

/**
 * Result code of every fallible call.
 */
typedef enum {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_ARGUMENT = 2,
  SB_STATUS_NO_CLOSED_FORM = 3,
  SB_STATUS_CONFIG = 4,
  SB_STATUS_IO = 5,
  SB_STATUS_NUMERICAL = 6,
  SB_STATUS_PANIC = 7,
} SbStatus;

/**
 * Opaque scenario handle.
 */
typedef struct SbScenario SbScenario;

/**
 * Opaque sweep handle.
 */
typedef struct SbSweep SbSweep;

/**
 * One sweep record.
 */
typedef struct {
  double time;
  SbPartition partition;
  SbMethod method;
  double mutual_info;
  double classical;
  double quantum;
  double concurrence;
  SbSide measured_side;
} SbRecord;

/**
 * Mutual information, classical correlation and discord of a two-qubit state.
 */
typedef struct {
  double mutual_info;
  double classical;
  double quantum;
} SbCorrelations;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *sb_last_error_message(void);

/**
 * Library version, static nul-terminated string.
 */
const char *sb_version(void);

/**
 * Builds a scenario on a uniform grid of `time_steps` points from
 * `time_start` to `time_end` (dimensionless γt or λt).
 */
SbStatus sb_scenario_new(SbFamily family,
                         double alpha_re,
                         double alpha_im,
                         double beta_re,
                         double beta_im,
                         SbSpectrum spectrum,
                         double param1,
                         double param2,
                         double time_start,
                         double time_end,
                         size_t time_steps,
                         SbScenario **out);

/**
 * Builds a scenario from a JSON run configuration.
 */
SbStatus sb_scenario_from_json(const char *json, SbScenario **out);

void sb_scenario_free(SbScenario *scenario);

size_t sb_scenario_time_count(const SbScenario *scenario);

/**
 * Sweeps `scenario` over the partitions whose bits (1 << SbPartition) are
 * set in `partition_mask`. `grid` and `refine` configure the measurement search.
 */
SbStatus sb_sweep_run(const SbScenario *scenario,
                      uint32_t partition_mask,
                      SbPipeline pipeline,
                      SbSide side,
                      size_t grid,
                      size_t refine,
                      SbSweep **out);

void sb_sweep_free(SbSweep *sweep);

size_t sb_sweep_len(const SbSweep *sweep);

SbStatus sb_sweep_record(const SbSweep *sweep, size_t index, SbRecord *out);

/**
 * 1 when every audit attached to the sweep passed, 0 otherwise or on null.
 */
int32_t sb_sweep_audits_passed(const SbSweep *sweep);

SbStatus sb_sweep_write_csv(const SbSweep *sweep, const char *path);

/**
 * ξ and χ at dimensionless time `t` (γt or λt); `w_over_lambda` is ignored for a flat spectrum.
 */
SbStatus sb_amplitudes(SbSpectrum spectrum,
                       double w_over_lambda,
                       double t,
                       double *xi,
                       double *chi);

/**
 * Brute-force correlations of a 4×4 density matrix given as row-major real
 * and imaginary parts (16 entries each).
 */
SbStatus sb_correlations(const double *rho_re,
                         const double *rho_im,
                         SbSide side,
                         size_t grid,
                         size_t refine,
                         SbCorrelations *out);

/**
 * Wootters concurrence of a 4×4 density matrix (row-major real/imaginary parts).
 */
SbStatus sb_concurrence(const double *rho_re, const double *rho_im, double *out);

/**
 * Closed-form classical correlation (= discord) of the spin pair for the
 * two-excitation family.
 */
SbStatus sb_closed_spin_two_exc(double beta2, double xi2, double chi2, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINBOSON_H */
