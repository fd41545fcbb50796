#ifndef RMC_H
#define RMC_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum RmcStatus {
  RMC_STATUS_OK = 0,
  RMC_STATUS_NULL_POINTER = 1,
  // Argument outside its domain, or an invalid size.
  RMC_STATUS_INVALID_ARGUMENT = 2,
  // The Gaussian input is too short for the request.
  RMC_STATUS_MISSING_INPUT = 3,
  // Scale or work budget exceeded.
  RMC_STATUS_BUDGET = 4,
  RMC_STATUS_NON_FINITE = 5,
  // A checked inequality or contract failed.
  RMC_STATUS_CONTRACT = 6,
  RMC_STATUS_UNSUPPORTED = 7,
  RMC_STATUS_INTERNAL = 8,
} RmcStatus;

// Exponentiation method for [`rmc_exp_series`].
typedef enum RmcMethod {
  RMC_METHOD_NAIVE = 0,
  RMC_METHOD_FAST = 1,
} RmcMethod;

// Opaque Gaussian input `X(1..=len)`.
typedef struct RmcGaussians RmcGaussians;

// Opaque block schedule.
typedef struct RmcSchedule RmcSchedule;

// Variance diagnostics at one `n`; block terms are reported as their sup over `j`.
typedef struct RmcDiagnostics {
  size_t n;
  double v;
  double v_tilde;
  double v_block_sup;
  double w;
  double v2;
  double v2_tilde;
  double v2_block_sup;
} RmcDiagnostics;

// An exact second moment and the bound it must respect.
typedef struct RmcBoundPair {
  double exact;
  double bound;
  bool holds;
} RmcBoundPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on the same thread.
const char *rmc_last_error(void);

// Library version as a static NUL-terminated string.
const char *rmc_version(void);

// Samples `X(1..=len)` from the stream `(seed, trial)`.
//
// # Safety
// `out` must be valid for one pointer write.
enum RmcStatus rmc_gaussians_sample(size_t len,
                                    uint64_t seed,
                                    uint64_t trial,
                                    struct RmcGaussians **out);

// Wraps caller-supplied values `X(k) = re[k-1] + i im[k-1]`.
//
// # Safety
// `re` and `im` must point to `len` doubles; `out` must be valid for one write.
enum RmcStatus rmc_gaussians_from_values(const double *re,
                                         const double *im,
                                         size_t len,
                                         struct RmcGaussians **out);

// Number of values held, or 0 for null.
//
// # Safety
// `g` must be null or a live handle.
size_t rmc_gaussians_len(const struct RmcGaussians *g);

// Releases a handle; null is ignored.
//
// # Safety
// `g` must be null or a handle not yet freed.
void rmc_gaussians_free(struct RmcGaussians *g);

// `A(0..=n_max)` from `X(1..=n_max)`; `out_re`, `out_im` hold `n_max + 1` doubles.
//
// # Safety
// `g` must be a live handle; the output arrays must hold `n_max + 1` doubles.
enum RmcStatus rmc_exp_series(const struct RmcGaussians *g,
                              size_t n_max,
                              enum RmcMethod method,
                              double *out_re,
                              double *out_im);

// `A(n)` by partition enumeration (`n <= 60`).
//
// # Safety
// `g` must be a live handle; `re`, `im` valid for one write each.
enum RmcStatus rmc_a_oracle(const struct RmcGaussians *g, uint32_t n, double *re, double *im);

// Recovers `A(0..=n_max)` from `exp(Σ_{k<=r_trunc} X(k) z^k/√k)` on the
// circle of radius `radius`, doubling the quadrature until successive
// estimates agree within `tol`. `points_used` may be null.
//
// # Safety
// `g` must be a live handle; the output arrays must hold `n_max + 1` doubles.
enum RmcStatus rmc_cauchy_coefficients(const struct RmcGaussians *g,
                                       size_t r_trunc,
                                       double radius,
                                       size_t n_max,
                                       double tol,
                                       double *out_re,
                                       double *out_im,
                                       size_t *points_used);

// Builds the schedule for `(ℓ, K, ε)`; a NaN `c0` selects `1 + 100K`.
//
// # Safety
// `out` must be valid for one pointer write.
enum RmcStatus rmc_schedule_new(uint32_t ell,
                                double k_exponent,
                                double epsilon,
                                double c0,
                                struct RmcSchedule **out);

// Releases a handle; null is ignored.
//
// # Safety
// `s` must be null or a handle not yet freed.
void rmc_schedule_free(struct RmcSchedule *s);

// Index `J` of the last block, so cut points run over `0..=J`.
//
// # Safety
// `s` must be a live handle; `out` valid for one write.
enum RmcStatus rmc_schedule_last_block(const struct RmcSchedule *s, size_t *out);

// Cut point `y_j`; fails with `RMC_STATUS_BUDGET` if it does not fit 64 bits.
//
// # Safety
// `s` must be a live handle; `out` valid for one write.
enum RmcStatus rmc_schedule_cut(const struct RmcSchedule *s, size_t j, uint64_t *out);

// Supermartingale factor `b_j`, `1 <= j <= J`.
//
// # Safety
// `s` must be a live handle; `out` valid for one write.
enum RmcStatus rmc_b_factor(const struct RmcSchedule *s, size_t j, double *out);

// Variance diagnostics at `n`; `g` must cover `X(1..=n)`.
//
// # Safety
// `g`, `s` must be live handles; `out` valid for one write.
enum RmcStatus rmc_diagnostics(const struct RmcGaussians *g,
                               const struct RmcSchedule *s,
                               size_t n,
                               struct RmcDiagnostics *out);

// Small-part second moment against `r^{-n} exp(Σ_{k<=y0} r^k/k)`; a NaN
// `r` selects `e^{1/y0}`.
//
// # Safety
// `out` must be valid for one write.
enum RmcStatus rmc_a0_bound(uint32_t n, uint32_t y0, double r, struct RmcBoundPair *out);

// Triple-top second moment against `Σ_{y0<k<=n/3} k^{-3}`.
//
// # Safety
// `out` must be valid for one write.
enum RmcStatus rmc_a3_bound(uint32_t n, uint32_t y0, struct RmcBoundPair *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMC_H */
