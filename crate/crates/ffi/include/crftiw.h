/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef CRFTIW_H
#define CRFTIW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Outcome of a call.
 */
typedef enum CrftiwStatus {
  CRFTIW_STATUS_OK = 0,
  CRFTIW_STATUS_NULL_POINTER = 1,
  /*
   An output buffer is too small or an argument is out of range.
   */
  CRFTIW_STATUS_INVALID_ARGUMENT = 2,
  CRFTIW_STATUS_WAVELET = 3,
  CRFTIW_STATUS_REGRESSION = 4,
  CRFTIW_STATUS_MIXTURE = 5,
  CRFTIW_STATUS_EVALUATION = 6,
  CRFTIW_STATUS_IO = 7,
  /*
   A Rust panic was caught at the boundary.
   */
  CRFTIW_STATUS_INTERNAL = 8,
} CrftiwStatus;

/*
 Fitted single-index regression.
 */
typedef struct CrftiwIndexFit CrftiwIndexFit;

/*
 Fitted nonparametric mixture.
 */
typedef struct CrftiwMixture CrftiwMixture;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *crftiw_last_error(void);

/*
 Translation-invariant log-energy features of one curve of dyadic length `len`.

 Writes `log2(len) + 1` values to `out` (capacity `out_cap`) and their count
 to `written`. `wavelet` may be NULL for the default Symmlet 8.

 # Safety
 Pointers must be valid for the given lengths.
 */
enum CrftiwStatus crftiw_featurize_ti(const double *values,
                                      size_t len,
                                      const char *wavelet,
                                      double *out,
                                      size_t out_cap,
                                      size_t *written);

/*
 Relative deviation of the weighted transform energy from the curve energy.

 # Safety
 Pointers must be valid for the given lengths.
 */
enum CrftiwStatus crftiw_parseval_error(const double *values,
                                        size_t len,
                                        const char *wavelet,
                                        double *error);

/*
 Adjusted Rand index of two labellings of `n` items.

 # Safety
 Pointers must be valid for `n` elements.
 */
enum CrftiwStatus crftiw_ari(const size_t *first, const size_t *second, size_t n, double *index);

/*
 Elbow choice among `L = 1..=len` given the smoothed log-likelihoods.

 # Safety
 Pointers must be valid for the given lengths.
 */
enum CrftiwStatus crftiw_select_l(const double *loglik, size_t len, double tau, size_t *selected);

/*
 Regresses the `n x p` features on the `n x d` covariates.

 `zero_index` < 0 fits freely; otherwise that coefficient is held at zero.

 # Safety
 Matrices must hold `n * p` and `n * d` values; `fit` must be writable.
 */
enum CrftiwStatus crftiw_index_fit(const double *features,
                                   size_t n,
                                   size_t p,
                                   const double *covariates,
                                   size_t d,
                                   int64_t zero_index,
                                   uint64_t seed,
                                   struct CrftiwIndexFit **fit);

/*
 Copies the unit index direction (`d` values).

 # Safety
 `fit` must come from [`crftiw_index_fit`]; `out` must hold `cap` values.
 */
enum CrftiwStatus crftiw_index_fit_gamma(const struct CrftiwIndexFit *fit, double *out, size_t cap);

/*
 Copies the `n x p` residual matrix, row-major.

 # Safety
 `fit` must come from [`crftiw_index_fit`]; `out` must hold `cap` values.
 */
enum CrftiwStatus crftiw_index_fit_residuals(const struct CrftiwIndexFit *fit,
                                             double *out,
                                             size_t cap);

/*
 Profile loss at the fitted direction.

 # Safety
 `fit` must come from [`crftiw_index_fit`].
 */
enum CrftiwStatus crftiw_index_fit_loss(const struct CrftiwIndexFit *fit, double *loss);

/*
 Releases a regression handle. NULL is ignored.

 # Safety
 `fit` must come from [`crftiw_index_fit`] and not be used afterwards.
 */
void crftiw_index_fit_free(struct CrftiwIndexFit *fit);

/*
 Fits an `l`-component mixture to the `n x p` residual matrix.

 # Safety
 `residuals` must hold `n * p` values; `mixture` must be writable.
 */
enum CrftiwStatus crftiw_mixture_fit(const double *residuals,
                                     size_t n,
                                     size_t p,
                                     size_t l,
                                     uint64_t seed,
                                     struct CrftiwMixture **mixture);

/*
 Maximized smoothed log-likelihood.

 # Safety
 `mixture` must come from [`crftiw_mixture_fit`].
 */
enum CrftiwStatus crftiw_mixture_loglik(const struct CrftiwMixture *mixture, double *loglik);

/*
 Copies the `n x l` posterior probabilities, row-major.

 # Safety
 `mixture` must come from [`crftiw_mixture_fit`]; `out` must hold `cap` values.
 */
enum CrftiwStatus crftiw_mixture_posteriors(const struct CrftiwMixture *mixture,
                                            double *out,
                                            size_t cap);

/*
 Writes the maximum a posteriori labels (`1..=l`) of the `n` rows.

 # Safety
 `mixture` must come from [`crftiw_mixture_fit`]; `out` must hold `cap` values.
 */
enum CrftiwStatus crftiw_mixture_labels(const struct CrftiwMixture *mixture,
                                        size_t *out,
                                        size_t cap);

/*
 Releases a mixture handle. NULL is ignored.

 # Safety
 `mixture` must come from [`crftiw_mixture_fit`] and not be used afterwards.
 */
void crftiw_mixture_free(struct CrftiwMixture *mixture);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRFTIW_H */
