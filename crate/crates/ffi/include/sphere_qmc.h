#ifndef SPHERE_QMC_H
#define SPHERE_QMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Sampler selector for [`sqmc_sample`].
 */
typedef enum SqmcSampler {
  SQMC_SAMPLER_SPHERICAL_EIG = 0,
  SQMC_SAMPLER_SPHERICAL_DPP = 1,
  SQMC_SAMPLER_IID_UNIFORM = 2,
  SQMC_SAMPLER_EQUAL_AREA_JITTER = 3,
  SQMC_SAMPLER_FIBONACCI = 4,
} SqmcSampler;

typedef enum SqmcStatus {
  SQMC_STATUS_OK = 0,
  SQMC_STATUS_NULL_POINTER = 1,
  SQMC_STATUS_INVALID_INPUT = 2,
  SQMC_STATUS_DOMAIN = 3,
  /*
   Iteration, factorization or tolerance failure inside a computation.
   */
  SQMC_STATUS_NUMERICAL = 4,
  SQMC_STATUS_BUFFER_TOO_SMALL = 5,
  SQMC_STATUS_IO = 6,
  SQMC_STATUS_PANIC = 7,
} SqmcStatus;

/*
 Opaque point configuration.
 */
typedef struct SqmcConfig SqmcConfig;

/*
 Worst-case error: `value² ± tail_bound` brackets the exact square.
 */
typedef struct SqmcWce {
  double value;
  double tail_bound;
  uint64_t truncation_l;
} SqmcWce;

typedef struct SqmcExplicitConfidence {
  double wce_bound;
  double numerator;
  double failure_prob;
  double failure_prob_loose;
} SqmcExplicitConfidence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the calling thread's last error message into `buf` (truncated,
 always NUL-terminated when `len > 0`) and returns its full length in
 bytes, excluding the terminator. Returns 0 when there is no message.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t sqmc_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *sqmc_version(void);

/*
 Builds a configuration from `n` points stored as `x0,y0,z0,x1,...`.
 Points within `1e-6` of the unit sphere are renormalized; others are
 rejected.

 # Safety
 `xyz` must point to `3 * n` readable doubles and `out` must be writable.
 */
enum SqmcStatus sqmc_config_from_xyz(const double *xyz, size_t n, struct SqmcConfig **out);

/*
 Draws one configuration from stream `(seed, stream_id)`.

 # Safety
 `out` must be writable.
 */
enum SqmcStatus sqmc_sample(uint32_t sampler,
                            size_t n,
                            uint64_t seed,
                            uint64_t stream_id,
                            struct SqmcConfig **out);

/*
 Number of points, or 0 for a null handle.

 # Safety
 `config` must be null or a live handle.
 */
size_t sqmc_config_len(const struct SqmcConfig *config);

/*
 Copies the points as `x0,y0,z0,x1,...` into `out`, which holds `cap`
 doubles and needs at least `3 * len`.

 # Safety
 `config` must be a live handle and `out` must point to `cap` writable doubles.
 */
enum SqmcStatus sqmc_config_copy_xyz(const struct SqmcConfig *config, double *out, size_t cap);

/*
 Releases a handle. Null is ignored.

 # Safety
 `config` must be null or a handle not yet freed.
 */
void sqmc_config_free(struct SqmcConfig *config);

/*
 `wce(config; s)` by the Legendre series, certified to `tol` on the square.

 # Safety
 `config` must be a live handle and `out` writable.
 */
enum SqmcStatus sqmc_wce(const struct SqmcConfig *config,
                         double s,
                         double tol,
                         struct SqmcWce *out);

/*
 `wce(config; s)` through the heat-kernel integral.

 # Safety
 `config` must be a live handle and `out` writable.
 */
enum SqmcStatus sqmc_wce_heat(const struct SqmcConfig *config,
                              double s,
                              double tol,
                              struct SqmcWce *out);

/*
 Explicit confidence bound on `wce(·;2)` for `n` points and `eta`.

 # Safety
 `out` must be writable.
 */
enum SqmcStatus sqmc_explicit_confidence(uint64_t n,
                                         double eta,
                                         struct SqmcExplicitConfidence *out);

/*
 Bound on `P(‖δ_N − σ‖_{-(2+eps)} > delta)`, clipped to [0, 1].

 # Safety
 `out` must be writable.
 */
enum SqmcStatus sqmc_concentration_tail(uint64_t n, double eps, double delta, double *out);

/*
 Spectral zeta `Σ (2l+1) (l(l+1))^{-p}` with a certified error.

 # Safety
 `value` and `error` must be writable.
 */
enum SqmcStatus sqmc_zeta(double p, double tol, double *value, double *error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHERE_QMC_H */
