/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef IVP_H
#define IVP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum IvpStatus {
  IvpStatus_Ok = 0,
  IvpStatus_NullPointer = 1,
  IvpStatus_InvalidUtf8 = 2,
  IvpStatus_Syntax = 3,
  IvpStatus_Validation = 4,
  IvpStatus_Computation = 5,
  IvpStatus_Verification = 6,
  IvpStatus_Panic = 7,
} IvpStatus;

/**
 * The outcome of a full analysis.
 */
typedef struct IvpAnalysis IvpAnalysis;

/**
 * A validated factored polynomial together with its prime.
 */
typedef struct IvpPolynomial IvpPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `(g1)^m1*(g2)^m2*…` over `Z_(p)` and validates the factored form.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum IvpStatus ivp_polynomial_parse(const char *text, uint64_t p, struct IvpPolynomial **out);

/**
 * # Safety
 * `poly` must be null or a handle from [`ivp_polynomial_parse`] not yet freed.
 */
void ivp_polynomial_free(struct IvpPolynomial *poly);

/**
 * `n = v(fixdiv(f))` for the numerator `f`.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_fixed_divisor_valuation(const struct IvpPolynomial *poly, uint64_t *out);

/**
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_analyze(const struct IvpPolynomial *poly, struct IvpAnalysis **out);

/**
 * # Safety
 * `analysis` must be null or a handle from [`ivp_analyze`] not yet freed.
 */
void ivp_analysis_free(struct IvpAnalysis *analysis);

/**
 * Whether `F = f/p^n` is irreducible in `Int(Z_(p))`.
 *
 * # Safety
 * `analysis` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_analysis_is_irreducible(const struct IvpAnalysis *analysis, bool *out);

/**
 * Writes 1 when `F` is absolutely irreducible, 0 when it is not and -1
 * when the analysis cannot decide (a proper power with trivial kernel).
 *
 * # Safety
 * `analysis` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_analysis_absolute_irreducibility(const struct IvpAnalysis *analysis,
                                                    int32_t *out);

/**
 * # Safety
 * `analysis` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_analysis_kernel_dimension(const struct IvpAnalysis *analysis, uintptr_t *out);

/**
 * The analysis as JSON; release with [`ivp_string_free`].
 *
 * # Safety
 * `analysis` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_analysis_to_json(const struct IvpAnalysis *analysis, char **out);

/**
 * Least `j ≤ j_max` with a non-unique factorization of `F^j`, or 0 when
 * every such power factors uniquely.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum IvpStatus ivp_min_nonunique_power(const struct IvpPolynomial *poly,
                                       uint64_t j_max,
                                       bool pruned,
                                       uint64_t *out);

/**
 * Generates and verifies the extremal family for `(r, n)` as JSON. A
 * nonzero `j_max` also confirms the least non-unique power with the
 * pruned oracle.
 *
 * # Safety
 * `out` must be writable.
 */
enum IvpStatus ivp_generate_family_json(uint64_t r, uint64_t n, uint64_t j_max, char **out);

/**
 * `(n+1)·((n−1)^{r−1} + (n−1)^{r−2})` as a decimal string.
 *
 * # Safety
 * `out` must be writable.
 */
enum IvpStatus ivp_expected_s(uint64_t r, uint64_t n, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ivp_string_free(char *s);

/**
 * The message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ivp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IVP_H */
