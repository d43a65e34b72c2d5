#ifndef HYPEROCT_H
#define HYPEROCT_H

#pragma once

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum HyperoctStatus {
  HYPEROCT_STATUS_OK = 0,
  HYPEROCT_STATUS_NULL_ARGUMENT = 1,
  HYPEROCT_STATUS_INVALID_UTF8 = 2,
  HYPEROCT_STATUS_INVALID_CONFIG = 3,
  HYPEROCT_STATUS_INVALID_WEIGHT = 4,
  HYPEROCT_STATUS_DIMENSION_MISMATCH = 5,
  HYPEROCT_STATUS_DOMAIN = 6,
  HYPEROCT_STATUS_DEGENERATE = 7,
  HYPEROCT_STATUS_PRECONDITION = 8,
  HYPEROCT_STATUS_ARITHMETIC = 9,
  HYPEROCT_STATUS_INTERNAL = 10,
  HYPEROCT_STATUS_PANIC = 11,
} HyperoctStatus;

/**
 * Opaque truncated weight function `Δ_K`.
 */
typedef struct HyperoctDelta HyperoctDelta;

/**
 * Opaque c-function parameter set.
 */
typedef struct HyperoctSpec HyperoctSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hyperoct_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *hyperoct_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void hyperoct_string_free(char *s);

/**
 * Parses a spec from its JSON form or a preset name
 * (`symplectic`, `hall-littlewood-sample`, `koornwinder-sample`).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum HyperoctStatus hyperoct_spec_new(const char *text, struct HyperoctSpec **out);

/**
 * # Safety
 * `spec` must come from [`hyperoct_spec_new`] or be null.
 */
void hyperoct_spec_free(struct HyperoctSpec *spec);

/**
 * Builds the truncated weight function of rank `n` at order `order`.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum HyperoctStatus hyperoct_delta_new(const struct HyperoctSpec *spec,
                                       size_t n,
                                       size_t order,
                                       struct HyperoctDelta **out);

/**
 * # Safety
 * `delta` must come from [`hyperoct_delta_new`] or be null.
 */
void hyperoct_delta_free(struct HyperoctDelta *delta);

/**
 * Monic orthogonal polynomial as JSON
 * `{"lambda": [...], "coords": {"2,1": "p/q", ...}, "norm_sq": "p/q"}`.
 * `lexicographic` selects the lexicographic ordering instead of dominance.
 *
 * # Safety
 * `delta` must be a live handle, `lambda` must point to `len` integers and
 * `out` must be a valid pointer.
 */
enum HyperoctStatus hyperoct_monic_orthogonal(const struct HyperoctDelta *delta,
                                              const int64_t *lambda,
                                              size_t len,
                                              bool lexicographic,
                                              char **out);

/**
 * Truncated asymptotic function `P_λ^{(m)}` as JSON `{"lambda", "m", "coords"}`.
 *
 * # Safety
 * `spec` must be a live handle, `lambda` must point to `len` integers and
 * `out` must be a valid pointer.
 */
enum HyperoctStatus hyperoct_truncated_asymptotic(const struct HyperoctSpec *spec,
                                                  const int64_t *lambda,
                                                  size_t len,
                                                  size_t m,
                                                  char **out);

/**
 * Inner product of two invariant polynomials given as monomial coordinates
 * (`{"2,1": "p/q", ...}`); writes the exact value as a `"p/q"` string.
 *
 * # Safety
 * `delta` must be a live handle, `f` and `g` valid NUL-terminated strings
 * and `out` a valid pointer.
 */
enum HyperoctStatus hyperoct_inner_product(const struct HyperoctDelta *delta,
                                           const char *f,
                                           const char *g,
                                           char **out);

/**
 * Error report of `P̃_λ/𝒩_λ` against `P^{(m_ref)}_λ` as JSON.
 *
 * # Safety
 * `spec` and `delta` must be live handles, `lambda` must point to `len`
 * integers and `out` must be a valid pointer.
 */
enum HyperoctStatus hyperoct_asymptotic_error(const struct HyperoctSpec *spec,
                                              const struct HyperoctDelta *delta,
                                              const int64_t *lambda,
                                              size_t len,
                                              size_t m,
                                              size_t m_ref,
                                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPEROCT_H */
