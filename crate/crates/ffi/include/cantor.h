#ifndef CANTOR_H
#define CANTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum CantorStatus {
  CANTOR_STATUS_OK = 0,
  CANTOR_STATUS_NULL_POINTER = 1,
  CANTOR_STATUS_INVALID_ARGUMENT = 2,
  CANTOR_STATUS_BUDGET = 3,
  CANTOR_STATUS_VERIFICATION = 4,
  CANTOR_STATUS_UNSUPPORTED = 5,
  CANTOR_STATUS_PANIC = 6,
} CantorStatus;

// Opaque handle to a validated pair (K, K').
typedef struct CantorPair CantorPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds the pair K = (p0, p1, a), K' = (q0, q1, b).
//
// # Safety
// All string arguments must be valid NUL-terminated strings and `out` a
// writable pointer. The handle must be released with [`cantor_pair_free`].
enum CantorStatus cantor_pair_new(const char *p0,
                                  const char *p1,
                                  const char *a,
                                  const char *q0,
                                  const char *q1,
                                  const char *b,
                                  struct CantorPair **out);

// Releases a handle from [`cantor_pair_new`]. Null is ignored.
//
// # Safety
// `pair` must be null or a handle not yet freed.
void cantor_pair_free(struct CantorPair *pair);

// Solves the Moran equation for `len` contraction ratios.
//
// # Safety
// `ratios` must point to `len` valid strings and `out` must be writable.
enum CantorStatus cantor_moran_dimension(const char *const *ratios, size_t len, double *out);

// `dim K + dim K'`.
//
// # Safety
// `pair` must be a live handle and `out` writable.
enum CantorStatus cantor_pair_hd_sum(const struct CantorPair *pair, double *out);

// Whether max(p0 q1, p1 q0) <= s0 / s1, so that K - sK' is an interval for every s in [s1, s0].
//
// # Safety
// `pair` must be a live handle and `out` writable.
enum CantorStatus cantor_pair_lemma1(const struct CantorPair *pair, bool *out);

// Decides whether `t` lies in K - sK' and returns the certificate as JSON.
//
// `max_depth` of 0 keeps the default search depth. An undecided query is
// still `CANTOR_STATUS_OK`; its verdict is `"unknown"`.
//
// # Safety
// `pair` must be a live handle, `s` and `t` valid strings and `json_out`
// writable. Free the result with [`cantor_string_free`].
enum CantorStatus cantor_certify_point(const struct CantorPair *pair,
                                       const char *s,
                                       const char *t,
                                       uint32_t max_depth,
                                       char **json_out);

// Classifies K - lambda K' and returns the result as JSON.
//
// `depth` of 0 keeps the default covering depth.
//
// # Safety
// `pair` must be a live handle, `lambda` a valid string and `json_out`
// writable. Free the result with [`cantor_string_free`].
enum CantorStatus cantor_classify(const struct CantorPair *pair,
                                  const char *lambda,
                                  uint32_t depth,
                                  char **json_out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `text` must be null or a string from this library not yet freed.
void cantor_string_free(char *text);

// Message for the last failed call on this thread, or null.
//
// The pointer stays valid until the next call into this library on the same thread.
const char *cantor_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANTOR_H */
