#ifndef EDAROF_H
#define EDAROF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdarofStatus {
  EDAROF_STATUS_OK = 0,
  EDAROF_STATUS_NULL_POINTER = 1,
  EDAROF_STATUS_INVALID_ARGUMENT = 2,
  EDAROF_STATUS_LENGTH_MISMATCH = 3,
  EDAROF_STATUS_SIMULATION = 4,
  EDAROF_STATUS_PANIC = 5,
} EdarofStatus;

/**
 * Opaque multiplexed signal with its segment layout.
 */
typedef struct EdarofMultiplex EdarofMultiplex;

/**
 * Opaque modulation plan.
 */
typedef struct EdarofPlan EdarofPlan;

typedef struct EdarofPlanInfo {
  double inv_eta;
  size_t order_m;
  size_t frame_len;
  size_t n_p;
  size_t n_r;
  size_t mux_len;
  bool drof_mode;
} EdarofPlanInfo;

typedef struct EdarofRecord {
  double inv_eta;
  size_t order_m;
  size_t n_p;
  size_t n_r;
  double snr_db;
  double evm_pct;
  uint64_t seed;
} EdarofRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *edarof_last_error(void);

/**
 * Plan for bandwidth expansion `inv_eta` (>= 1) over frames of `frame_len` samples,
 * with the default quantizer profile and equal-power scaling.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum EdarofStatus edarof_plan_new(double inv_eta, size_t frame_len, struct EdarofPlan **out);

/**
 * All-digital plan with `order` stages.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum EdarofStatus edarof_plan_new_drof(size_t order, size_t frame_len, struct EdarofPlan **out);

/**
 * # Safety
 * `plan` must be null or a handle from `edarof_plan_new*` not yet freed.
 */
void edarof_plan_free(struct EdarofPlan *plan);

/**
 * # Safety
 * `plan` must be a live handle and `out` writable.
 */
enum EdarofStatus edarof_plan_info(const struct EdarofPlan *plan, struct EdarofPlanInfo *out);

/**
 * Modulates `n` complex samples (`n` must equal the plan frame length).
 *
 * # Safety
 * `samples` must hold `2 * n` doubles; `plan` must be live; `out` writable.
 */
enum EdarofStatus edarof_modulate(const struct EdarofPlan *plan,
                                  const double *samples,
                                  size_t n,
                                  struct EdarofMultiplex **out);

/**
 * # Safety
 * `mux` must be null or a handle from `edarof_modulate` not yet freed.
 */
void edarof_multiplex_free(struct EdarofMultiplex *mux);

/**
 * # Safety
 * `mux` must be live and `len` writable.
 */
enum EdarofStatus edarof_multiplex_len(const struct EdarofMultiplex *mux, size_t *len);

/**
 * Copies the multiplexed samples into `out`, which holds `capacity` complex samples.
 *
 * # Safety
 * `out` must hold `2 * capacity` doubles.
 */
enum EdarofStatus edarof_multiplex_copy(const struct EdarofMultiplex *mux,
                                        double *out,
                                        size_t capacity);

/**
 * Replaces the samples (e.g. with a received copy); `n` must match the current length.
 *
 * # Safety
 * `mux` must be live and `samples` hold `2 * n` doubles.
 */
enum EdarofStatus edarof_multiplex_set_samples(struct EdarofMultiplex *mux,
                                               const double *samples,
                                               size_t n);

/**
 * Reconstructs the frame into `out` (`capacity` complex samples, at least the
 * frame length). With `noisy`, digital segments are sliced back onto their lattice.
 *
 * # Safety
 * Handles must be live; `out` must hold `2 * capacity` doubles.
 */
enum EdarofStatus edarof_demodulate(const struct EdarofPlan *plan,
                                    const struct EdarofMultiplex *mux,
                                    bool noisy,
                                    double *out,
                                    size_t capacity);

/**
 * Mid-rise Cartesian quantizer with `n_a` levels per axis over `[-full_scale, full_scale]`.
 * `out` may alias `samples`.
 *
 * # Safety
 * `samples` and `out` must each hold `2 * n` doubles.
 */
enum EdarofStatus edarof_quantize_cartesian(const double *samples,
                                            size_t n,
                                            uint32_t n_a,
                                            double full_scale,
                                            double *out);

/**
 * One end-to-end link run at `inv_eta` with master seed `seed`.
 * `config_toml` is a configuration document, or null for the defaults.
 *
 * # Safety
 * `config_toml` must be null or a NUL-terminated string; `out` writable.
 */
enum EdarofStatus edarof_run_single(const char *config_toml,
                                    double inv_eta,
                                    uint64_t seed,
                                    struct EdarofRecord *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDAROF_H */
