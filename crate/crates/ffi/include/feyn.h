#ifndef FEYN_H
#define FEYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `feyn_graph_count` flag: keep connected graphs only.
 */
#define FEYN_CONNECTED_ONLY 1

/**
 * `feyn_graph_count` flag: keep graphs without self-contractions only.
 */
#define FEYN_WICK_ONLY 2

/**
 * Result of every fallible call.
 */
typedef enum FeynStatus {
  FEYN_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  FEYN_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  FEYN_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, an invalid measure, or an inconsistent request.
   */
  FEYN_STATUS_CONFIG = 3,
  /**
   * Enumeration capacity or oracle order exceeded.
   */
  FEYN_STATUS_CAPACITY = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  FEYN_STATUS_PANIC = 5,
} FeynStatus;

/**
 * A measure together with its moment oracle.
 */
typedef struct FeynMeasure FeynMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *feyn_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *feyn_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void feyn_string_free(char *s);

/**
 * Builds a measure from its JSON description (the same format the `feyn`
 * command line reads).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FeynStatus feyn_measure_from_json(const char *json, struct FeynMeasure **out);

/**
 * Destroys a measure. NULL is ignored.
 *
 * # Safety
 * `m` must come from `feyn_measure_from_json` and not have been freed.
 */
void feyn_measure_free(struct FeynMeasure *m);

/**
 * Number of sites of the measure, 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live measure handle.
 */
size_t feyn_measure_num_sites(const struct FeynMeasure *m);

/**
 * Joint moment (or, with `truncated`, the cumulant) of the field at the
 * given sites, written as a rational string.
 *
 * # Safety
 * `sites` must point to `len` readable values (it may be NULL when `len`
 * is 0); `m` and `out` must be valid.
 */
enum FeynStatus feyn_moment(const struct FeynMeasure *m,
                            const size_t *sites,
                            size_t len,
                            bool truncated,
                            char **out);

/**
 * Number of graphs with `n` outer vertices and `m` inner vertices of
 * degree `p`, filtered by `FEYN_CONNECTED_ONLY` / `FEYN_WICK_ONLY`.
 * `capacity` bounds `n + p*m`; pass 0 for the default.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FeynStatus feyn_graph_count(size_t n,
                                 size_t m,
                                 size_t p,
                                 uint32_t flags,
                                 size_t capacity,
                                 uint64_t *out);

/**
 * DOT rendering of the graph given in canonical text form, e.g.
 * `"x1,v1.1|v1.2"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FeynStatus feyn_graph_dot(size_t n, size_t m, size_t p, const char *text, char **out);

/**
 * Computes a series. `request_json` is an object with fields
 * `p`, `order`, and optionally `external_sites`, `volume`
 * (`{"sites":[..],"weights":["1",..]}`), `wick_ordered`, `connected_only`,
 * `kind` (`"perturbation"`, `"free_energy"`, `"normalized_moment"`),
 * `jobs` and `capacity`. The result is JSON with `order`, `coefficients`,
 * `graph_counts`, `filtered` and `request`.
 *
 * # Safety
 * `m` must be a live measure handle, `request_json` a NUL-terminated
 * string and `out` a valid pointer.
 */
enum FeynStatus feyn_series_json(const struct FeynMeasure *m, const char *request_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEYN_H */
