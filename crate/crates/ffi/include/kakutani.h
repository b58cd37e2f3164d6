#ifndef KAKUTANI_H
#define KAKUTANI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KkStatus {
  KK_STATUS_OK = 0,
  KK_STATUS_INVALID_ARGUMENT = 1,
  KK_STATUS_RESOURCE_LIMIT = 2,
  KK_STATUS_NUMERIC = 3,
  KK_STATUS_NULL_POINTER = 4,
  /**
   * The result does not fit the output type.
   */
  KK_STATUS_OVERFLOW = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  KK_STATUS_INTERNAL = 6,
} KkStatus;

typedef enum KkVerdictKind {
  KK_VERDICT_KIND_SPREAD = 0,
  KK_VERDICT_KIND_NOT_SPREAD = 1,
  KK_VERDICT_KIND_BOUNDARY = 2,
} KkVerdictKind;

/**
 * Materialized patch of tiles.
 */
typedef struct KkPatch KkPatch;

/**
 * Classification result.
 */
typedef struct KkVerdict KkVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *kk_version(void);

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *kk_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` is null or came from this library and was not freed before.
 */
void kk_string_free(char *s);

/**
 * α ∈ (0, 1/2] with α^m = (1−α)^n.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_solve_alpha(uint32_t n, uint32_t m, double *out);

/**
 * Classifies the commensurable ratio n/m. Free the result with
 * [`kk_verdict_free`].
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_classify_ratio(uint32_t n, uint32_t m, struct KkVerdict **out);

/**
 * Classifies α after detecting its ratio class with denominators up to
 * `max_denominator`.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_classify_alpha(double alpha, uint32_t max_denominator, struct KkVerdict **out);

/**
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_kind(const struct KkVerdict *v, enum KkVerdictKind *out);

/**
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_alpha(const struct KkVerdict *v, double *out);

/**
 * Whether r_α is one of 1, 3/2, 2, 3, 4.
 *
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_theorem(const struct KkVerdict *v, bool *out);

/**
 * Perron root; `KK_STATUS_INVALID_ARGUMENT` for incommensurable α, which
 * has no substitution matrix.
 *
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_lambda1(const struct KkVerdict *v, double *out);

/**
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_lambda2_modulus(const struct KkVerdict *v, double *out);

/**
 * Flat JSON record of the verdict, freed with [`kk_string_free`].
 *
 * # Safety
 * `v` is null or a live verdict; `out` is null or valid for writes.
 */
enum KkStatus kk_verdict_to_json(const struct KkVerdict *v, char **out);

/**
 * # Safety
 * `v` is null or a live verdict not freed before.
 */
void kk_verdict_free(struct KkVerdict *v);

/**
 * F_t(I) with I's left endpoint at −offset·e^t, offset ∈ (0, 1). Fails with
 * `KK_STATUS_RESOURCE_LIMIT` above `max_tiles` tiles.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_patch_generate(double alpha,
                                double t,
                                double offset,
                                uint64_t max_tiles,
                                struct KkPatch **out);

/**
 * F_t(I) after `ell` steps of the commensurable rule n/m, anchored at 0.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_patch_generate_steps(uint32_t n,
                                      uint32_t m,
                                      uint32_t ell,
                                      uint64_t max_tiles,
                                      struct KkPatch **out);

/**
 * # Safety
 * `p` is null or a live patch; `out` is null or valid for writes.
 */
enum KkStatus kk_patch_len(const struct KkPatch *p, size_t *out);

/**
 * Left end and length of tile `i`, in left-to-right order.
 *
 * # Safety
 * `p` is null or a live patch; the outputs are null or valid for writes.
 */
enum KkStatus kk_patch_tile(const struct KkPatch *p, size_t i, double *position, double *length);

/**
 * # Safety
 * `p` is null or a live patch not freed before.
 */
void kk_patch_free(struct KkPatch *p);

/**
 * Number of tiles of F_t(I), without materializing them.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_count_tiles(double alpha, double t, uint64_t *out);

/**
 * Whether the ℓ-th iterate of the primitive cover reproduces F_{ℓg}(I)
 * exactly.
 *
 * # Safety
 * `out` is null or valid for writes.
 */
enum KkStatus kk_verify_cover(uint32_t n, uint32_t m, uint32_t ell, uint64_t max_tiles, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAKUTANI_H */
