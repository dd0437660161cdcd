#ifndef GL2K_H
#define GL2K_H

/* Generated by cbindgen from crates/gl2k-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum Gl2kStatus {
  GL2K_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GL2K_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8, or a parameter was out of range.
   */
  GL2K_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input lies outside the domain of the requested quantity.
   */
  GL2K_STATUS_UNDEFINED = 3,
  /**
   * An enumeration, factorization or quadrature budget was exceeded.
   */
  GL2K_STATUS_RESOURCE = 4,
  /**
   * The requested point or regime is not supported.
   */
  GL2K_STATUS_UNSUPPORTED = 5,
  /**
   * The configuration text was malformed or failed validation.
   */
  GL2K_STATUS_CONFIG = 6,
  /**
   * A panic inside the library.
   */
  GL2K_STATUS_INTERNAL = 7,
} Gl2kStatus;

/**
 * A regular elliptic datum.
 */
typedef struct Gl2kDatum Gl2kDatum;

/**
 * A number field: ℚ or a real quadratic field.
 */
typedef struct Gl2kField Gl2kField;

/**
 * A verification report.
 */
typedef struct Gl2kReport Gl2kReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a successful call. The
 * pointer stays valid until the next call on this thread.
 */
const char *gl2k_last_error(void);

/**
 * Creates the rational field.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum Gl2kStatus gl2k_field_rational(struct Gl2kField **out);

/**
 * Creates `ℚ(√m)` for squarefree `m > 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum Gl2kStatus gl2k_field_quadratic(int64_t m, struct Gl2kField **out);

/**
 * Discriminant of the field (1 for ℚ).
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum Gl2kStatus gl2k_field_discriminant(const struct Gl2kField *field, int64_t *out);

/**
 * Releases a field handle; null is ignored.
 *
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void gl2k_field_free(struct Gl2kField *field);

/**
 * Creates a datum with `det γ = u·ρ^k` and trace `τ`, where `ρ` generates the prime of
 * index `index` above `p`. Integers are given as `x + yω`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum Gl2kStatus gl2k_datum_new(const struct Gl2kField *field,
                               uint64_t p,
                               uint8_t index,
                               uint32_t k,
                               int64_t u_x,
                               int64_t u_y,
                               int64_t tau_x,
                               int64_t tau_y,
                               struct Gl2kDatum **out);

/**
 * Discriminant `δ = τ² − 4 det γ` as `x + yω`.
 *
 * # Safety
 * `datum` must be a live handle; `x` and `y` valid for writes.
 */
enum Gl2kStatus gl2k_datum_delta(const struct Gl2kDatum *datum, int64_t *x, int64_t *y);

/**
 * Finite orbital value as a reduced fraction `numer/denom`, before the `p^{-k/2}` scaling.
 *
 * # Safety
 * `datum` must be a live handle; `numer` and `denom` valid for writes.
 */
enum Gl2kStatus gl2k_datum_finite_orbital(const struct Gl2kDatum *datum,
                                          int64_t *numer,
                                          int64_t *denom);

/**
 * Truncated global Dirichlet series at `z` over primes of norm at most `bound`, with its
 * closed form and the tail bound of the truncation. Requires `Re z > 1`.
 *
 * # Safety
 * `datum` must be a live handle; `value` and `closed` must point to two doubles each
 * (real, imaginary); `tail_bound` valid for writes.
 */
enum Gl2kStatus gl2k_global_dirichlet(const struct Gl2kDatum *datum,
                                      double z_re,
                                      double z_im,
                                      uint64_t bound,
                                      double *value,
                                      double *closed,
                                      double *tail_bound);

/**
 * Local Kloosterman-type sum at `𝔮^v, 𝔮^r` with constant `4uρ^{k'}`, for the prime of
 * index `index` above `q` and `ρ = ρ_x + ρ_y ω`. Writes the enumerated value and, when a
 * closed form applies, sets `has_closed` and writes it to `closed`.
 *
 * # Safety
 * `field` must be a live handle; the output pointers valid for writes.
 */
enum Gl2kStatus gl2k_local_sum(const struct Gl2kField *field,
                               uint64_t q,
                               uint8_t index,
                               uint32_t v,
                               uint32_t r,
                               int64_t u_x,
                               int64_t u_y,
                               int64_t rho_x,
                               int64_t rho_y,
                               uint32_t k_prime,
                               int64_t *bruteforce,
                               int64_t *closed,
                               bool *has_closed);

/**
 * Releases a datum handle; null is ignored.
 *
 * # Safety
 * `datum` must be null or a handle not yet freed.
 */
void gl2k_datum_free(struct Gl2kDatum *datum);

/**
 * Runs the suite named `suite` (`verify-dirichlet`, `verify-lfun` or `verify-orbital`)
 * under the TOML configuration `config` (may be empty or null for defaults).
 *
 * # Safety
 * `suite` must be a nul-terminated string, `config` null or nul-terminated, and `out`
 * valid for writes.
 */
enum Gl2kStatus gl2k_run_suite(const char *suite, const char *config, struct Gl2kReport **out);

/**
 * Whether every check in the report passed.
 *
 * # Safety
 * `report` must be a live handle and `out` valid for writes.
 */
enum Gl2kStatus gl2k_report_pass(const struct Gl2kReport *report, bool *out);

/**
 * Number of checks and failed checks in the report.
 *
 * # Safety
 * `report` must be a live handle; `checks` and `failed` valid for writes.
 */
enum Gl2kStatus gl2k_report_counts(const struct Gl2kReport *report, size_t *checks, size_t *failed);

/**
 * The report as JSON. Release the string with [`gl2k_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` valid for writes.
 */
enum Gl2kStatus gl2k_report_json(const struct Gl2kReport *report, char **out);

/**
 * Releases a report handle; null is ignored.
 *
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void gl2k_report_free(struct Gl2kReport *report);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void gl2k_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GL2K_H */
