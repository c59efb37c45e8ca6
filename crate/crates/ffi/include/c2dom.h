#ifndef C2DOM_H
#define C2DOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum C2domStatus {
  C2DOM_OK = 0,
  C2DOM_NULL_POINTER = 1,
  C2DOM_INVALID_UTF8 = 2,
  C2DOM_MALFORMED_INPUT = 3,
  C2DOM_OMITTED_VALUE = 4,
  C2DOM_NUMERICAL_FAILURE = 5,
  C2DOM_CERTIFICATION_FAILED = 6,
  C2DOM_NO_INVERSE = 7,
  C2DOM_PANIC = 8,
} C2domStatus;

/**
 * Opaque map handle.
 */
typedef struct C2domMap C2domMap;

/**
 * A point of `C^2`.
 */
typedef struct C2domPoint {
  double z_re;
  double z_im;
  double w_re;
  double w_im;
} C2domPoint;

/**
 * Row-major complex 2x2 matrix `[[a, b], [c, d]]`.
 */
typedef struct C2domJacobian {
  double a_re;
  double a_im;
  double b_re;
  double b_im;
  double c_re;
  double c_im;
  double d_re;
  double d_im;
} C2domJacobian;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *c2dom_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void c2dom_string_free(char *s);

/**
 * Verdict JSON for a descriptor. `kind` is `"orbifold"`, `"p2"` or
 * `"surface"`.
 *
 * # Safety
 * `kind` and `spec_json` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum C2domStatus c2dom_classify_json(const char *kind, const char *spec_json, char **out);

/**
 * `psi(t, w) = (t, (exp(t w) - 1) / t)`, extended by `w` at `t = 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum C2domStatus c2dom_psi_eval(struct C2domPoint p, struct C2domPoint *out);

/**
 * The `w` with `psi(t, w) = c` on the principal branch; `C2DOM_OMITTED_VALUE`
 * for `c = -1/t`.
 *
 * # Safety
 * `out` must be writable.
 */
enum C2domStatus c2dom_psi_preimage(struct C2domPoint target, struct C2domPoint *out);

/**
 * Graph-complement map for the rational function given as
 * `{"num": [...], "den": [...]}`.
 *
 * # Safety
 * `rational_json` must be a NUL-terminated string; `out` must be writable.
 */
enum C2domStatus c2dom_graph_complement_new(const char *rational_json, struct C2domMap **out);

/**
 * Map described by a pipeline file (`{"kind": ..., "spec": ...}`).
 * Torus pipelines are certified first and fail with
 * `C2DOM_CERTIFICATION_FAILED`.
 *
 * # Safety
 * `pipeline_json` must be a NUL-terminated string; `out` must be writable.
 */
enum C2domStatus c2dom_map_from_pipeline(const char *pipeline_json, struct C2domMap **out);

/**
 * # Safety
 * `map` must be null or a handle from this library not yet freed.
 */
void c2dom_map_free(struct C2domMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum C2domStatus c2dom_map_eval(const struct C2domMap *map,
                                struct C2domPoint p,
                                struct C2domPoint *out);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum C2domStatus c2dom_map_jacobian(const struct C2domMap *map,
                                    struct C2domPoint p,
                                    struct C2domJacobian *out);

/**
 * Exact preimage. `C2DOM_NO_INVERSE` if the map has no inverse formula,
 * `C2DOM_OMITTED_VALUE` if `target` is not in the image.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum C2domStatus c2dom_map_preimage(const struct C2domMap *map,
                                    struct C2domPoint target,
                                    struct C2domPoint *out);

/**
 * Runs `verify` on a pipeline and returns the report JSON (no timestamp).
 * The status is `C2DOM_CERTIFICATION_FAILED` when any check fails; the
 * report is written to `out` in that case too.
 *
 * # Safety
 * `pipeline_json` must be a NUL-terminated string; `out` must be writable.
 */
enum C2domStatus c2dom_verify_json(const char *pipeline_json,
                                   size_t samples,
                                   uint64_t seed,
                                   char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* C2DOM_H */
