#ifndef MLCS_H
#define MLCS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum MlcsStatus {
  MLCS_STATUS_OK = 0,
  /**
   * Invalid argument or parameter outside the domain.
   */
  MLCS_STATUS_DOMAIN = 1,
  MLCS_STATUS_OVERFLOW = 2,
  /**
   * Series hit its term budget; partial results are still written.
   */
  MLCS_STATUS_NON_CONVERGENCE = 3,
  MLCS_STATUS_DIVERGENT = 4,
  MLCS_STATUS_QUADRATURE = 5,
  MLCS_STATUS_TRUNCATION_OVERFLOW = 6,
  MLCS_STATUS_ROUTE_MISMATCH = 7,
  MLCS_STATUS_SINGULAR = 8,
  MLCS_STATUS_NULL_POINTER = 9,
  /**
   * A Rust panic was caught at the boundary.
   */
  MLCS_STATUS_PANIC = 10,
} MlcsStatus;

/**
 * Opaque parameter set `(α, β, γ, k)`.
 */
typedef struct MlcsParams MlcsParams;

/**
 * Opaque truncated coherent state.
 */
typedef struct MlcsState MlcsState;

/**
 * Value of a series evaluation.
 */
typedef struct MlcsSeries {
  double value;
  size_t terms_used;
  double tail_bound;
  bool converged;
} MlcsSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *mlcs_last_error(void);

/**
 * Creates a parameter set.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum MlcsStatus mlcs_params_new(double alpha,
                                double beta,
                                double gamma,
                                double k,
                                struct MlcsParams **out);

/**
 * Releases a parameter set. Null is ignored.
 *
 * # Safety
 * `p` must come from [`mlcs_params_new`] and not be used afterwards.
 */
void mlcs_params_free(struct MlcsParams *p);

/**
 * The generalized Mittag-Leffler function at real `z` by its defining series.
 * On non-convergence the partial sum is still written.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_ml_eval(const struct MlcsParams *params,
                             double z,
                             double rel_tol,
                             size_t max_terms,
                             struct MlcsSeries *out);

/**
 * The same function through the confluent hypergeometric route.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_ml_eval_1f1(const struct MlcsParams *params,
                                 double z,
                                 double rel_tol,
                                 size_t max_terms,
                                 struct MlcsSeries *out);

/**
 * `Γ_k(x)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MlcsStatus mlcs_k_gamma(double x, double k, double *out);

/**
 * `(x)_{n,k}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MlcsStatus mlcs_k_pochhammer(double x, uint32_t n, double k, double *out);

/**
 * Structure constant `e(n)`, `n ≥ 1`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_structure_e(const struct MlcsParams *params, uint32_t n, double *out);

/**
 * `⟨z1|z2⟩`, written as real and imaginary parts.
 *
 * # Safety
 * `params` must be a live handle; `out_re` and `out_im` writable.
 */
enum MlcsStatus mlcs_overlap(const struct MlcsParams *params,
                             double z1_re,
                             double z1_im,
                             double z2_re,
                             double z2_im,
                             double *out_re,
                             double *out_im);

/**
 * Builds the coherent state `|z⟩` in the number basis.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_cs_build(const struct MlcsParams *params,
                              double z_re,
                              double z_im,
                              struct MlcsState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `s` must come from [`mlcs_cs_build`] and not be used afterwards.
 */
void mlcs_state_free(struct MlcsState *s);

/**
 * Number of stored coefficients.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_state_len(const struct MlcsState *s, size_t *out);

/**
 * Coefficient `c_n`.
 *
 * # Safety
 * `s` must be a live handle; `out_re` and `out_im` writable.
 */
enum MlcsStatus mlcs_state_coeff(const struct MlcsState *s,
                                 size_t n,
                                 double *out_re,
                                 double *out_im);

/**
 * Probability mass discarded by the truncation.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_state_tail_mass(const struct MlcsState *s, double *out);

/**
 * The Meijer-G weight `G((k/α) x)`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_meijer_g_weight(const struct MlcsParams *params, double x, double *out);

/**
 * Radial density `h(x)` of the resolving measure.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_measure_weight_h(const struct MlcsParams *params, double x, double *out);

/**
 * Husimi function of the thermal state with spectrum `E_n = (β/γ) n`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_husimi_q(const struct MlcsParams *params,
                              double beta_b,
                              double z_re,
                              double z_im,
                              double *out);

/**
 * P function of the same thermal state.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum MlcsStatus mlcs_p_function(const struct MlcsParams *params,
                                double beta_b,
                                double z_re,
                                double z_im,
                                double *out);

/**
 * Partition function of the linear spectrum `E_n = slope·n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MlcsStatus mlcs_partition_linear(double beta_b, double slope, double *out);

/**
 * `ν(x) = ∫₀^∞ x^E / Γ(E+1) dE`.
 *
 * # Safety
 * `out` must be writable.
 */
enum MlcsStatus mlcs_nu(double x, double *out);

/**
 * Husimi function of the continuum thermal state.
 *
 * # Safety
 * `out` must be writable.
 */
enum MlcsStatus mlcs_continuum_husimi(double beta_b, double z_re, double z_im, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLCS_H */
