#ifndef NODAL_LAB_H
#define NODAL_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NlBoundary {
  NL_BOUNDARY_DIRICHLET = 0,
  NL_BOUNDARY_NEUMANN = 1,
  NL_BOUNDARY_PERIODIC = 2,
} NlBoundary;

/**
 * Domain families accepted by [`nl_spectrum_solve`].
 */
typedef enum NlDomain {
  /**
   * Disc of radius `p1`.
   */
  NL_DOMAIN_DISC = 0,
  /**
   * Annulus `1 < ρ < p1`.
   */
  NL_DOMAIN_ANNULUS = 1,
  /**
   * Rectangle `(0, p1) × (0, p2)`.
   */
  NL_DOMAIN_RECT = 2,
} NlDomain;

/**
 * Result code of every fallible call.
 */
typedef enum NlStatus {
  NL_STATUS_OK = 0,
  NL_STATUS_NULL_POINTER = 1,
  NL_STATUS_INVALID_ARGUMENT = 2,
  NL_STATUS_RESOLUTION = 3,
  NL_STATUS_PRECONDITION = 4,
  NL_STATUS_NO_CONVERGENCE = 5,
  NL_STATUS_DISCONNECTED = 6,
  NL_STATUS_IO = 7,
  NL_STATUS_INTERNAL = 8,
} NlStatus;

/**
 * Opaque: one experiment report with its cached JSON text.
 */
typedef struct NlReport NlReport;

/**
 * Opaque: computed eigenpairs of one discrete domain.
 */
typedef struct NlSpectrum NlSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *nl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nl_version(void);

/**
 * First positive zero of `J_order` for `order` 0 or 1.
 *
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum NlStatus nl_bessel_first_zero(uint32_t order, double *out);

/**
 * Least positive root μ(r) of the annulus cross-product, `r > 1`.
 *
 * # Safety
 * `out` must be null or valid for a write of one `double`.
 */
enum NlStatus nl_cross_product_mu(double r, double *out);

/**
 * Number of zeros of the string combination `Σ coeffs[k]·u_k` inside the
 * open interval.
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles; `out` must be null or
 * valid for one write.
 */
enum NlStatus nl_string_node_count(enum NlBoundary bc,
                                   const double *coeffs,
                                   size_t len,
                                   size_t *out);

/**
 * Smallest `count` Dirichlet eigenvalues of a gridded domain.
 *
 * # Safety
 * `out` must be null or valid for a write of one pointer. On success the
 * handle must be released with [`nl_spectrum_free`].
 */
enum NlStatus nl_spectrum_solve(enum NlDomain domain,
                                double p1,
                                double p2,
                                double h,
                                size_t count,
                                struct NlSpectrum **out);

/**
 * Number of eigenpairs held by `s` (0 for null).
 *
 * # Safety
 * `s` must be null or a live handle from [`nl_spectrum_solve`].
 */
size_t nl_spectrum_len(const struct NlSpectrum *s);

/**
 * Eigenvalue `index` (0-based) of `s`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` null or valid for one write.
 */
enum NlStatus nl_spectrum_eigenvalue(const struct NlSpectrum *s, size_t index, double *out);

/**
 * Release a spectrum handle; null is ignored.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void nl_spectrum_free(struct NlSpectrum *s);

/**
 * Run acceptance criterion `id` (1–13), quick or full profile.
 *
 * # Safety
 * `out` must be null or valid for a write of one pointer. On success the
 * handle must be released with [`nl_report_free`].
 */
enum NlStatus nl_run_criterion(uint32_t id, bool quick, struct NlReport **out);

/**
 * 1 when the report has no FAIL verdict, 0 otherwise (and for null).
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int32_t nl_report_passed(const struct NlReport *r);

/**
 * JSON text of the report, valid until the handle is freed.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
const char *nl_report_json(const struct NlReport *r);

/**
 * Release a report handle; null is ignored.
 *
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void nl_report_free(struct NlReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NODAL_LAB_H */
