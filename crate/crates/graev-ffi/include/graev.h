#ifndef GRAEV_H
#define GRAEV_H

/* Generated by cbindgen from graev-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum GraevStatus {
  /**
   * Success.
   */
  GRAEV_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  GRAEV_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GRAEV_STATUS_INVALID_UTF8 = 2,
  /**
   * The input text does not parse; see `graev_last_error`.
   */
  GRAEV_STATUS_PARSE_ERROR = 3,
  /**
   * A word does not parse over the system's alphabet.
   */
  GRAEV_STATUS_WORD_ERROR = 4,
  /**
   * A mathematical validation failed; see `graev_last_error`.
   */
  GRAEV_STATUS_MATH_ERROR = 5,
  /**
   * The library panicked internally; the handle is still usable.
   */
  GRAEV_STATUS_INTERNAL_ERROR = 6,
} GraevStatus;

/**
 * An HNN extension of a finite metric group, ready for distance queries.
 * Opaque.
 */
typedef struct GraevHnn GraevHnn;

/**
 * An amalgamated free product of finite metric groups, ready for distance
 * queries. Opaque.
 */
typedef struct GraevSystem GraevSystem;

/**
 * An exact rational `num/den` in lowest terms, `den > 0`.
 */
typedef struct GraevRational {
  int64_t num;
  int64_t den;
} GraevRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message of the last failing call on this thread. Never NULL; empty
 * before the first failure. Valid until the next failing call.
 */
const char *graev_last_error(void);

/**
 * Parse `text` (the documented line-oriented format) and build the
 * amalgam it declares. On success writes a handle to `out`.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` non-NULL and writable.
 */
enum GraevStatus graev_system_new(const char *text, struct GraevSystem **out);

/**
 * Release a handle created by `graev_system_new`. NULL is a no-op.
 *
 * # Safety
 * `h` must come from `graev_system_new` and not be used afterwards.
 */
void graev_system_free(struct GraevSystem *h);

/**
 * The Graev norm of the element spelled by `word`.
 *
 * # Safety
 * `h` must be a live handle; `word` NUL-terminated; `out` writable.
 */
enum GraevStatus graev_system_norm(const struct GraevSystem *h,
                                   const char *word,
                                   struct GraevRational *out);

/**
 * The Graev distance between the elements spelled by `f` and `g`.
 *
 * # Safety
 * As for `graev_system_norm`.
 */
enum GraevStatus graev_system_distance(const struct GraevSystem *h,
                                       const char *f,
                                       const char *g,
                                       struct GraevRational *out);

/**
 * Like `graev_system_norm` but cross-checked against the brute-force
 * search up to words of length `max_len`; fails with `MathError` if the
 * two strategies disagree.
 *
 * # Safety
 * As for `graev_system_norm`.
 */
enum GraevStatus graev_system_norm_checked(const struct GraevSystem *h,
                                           const char *word,
                                           uintptr_t max_len,
                                           struct GraevRational *out);

/**
 * Parse `text`, build the HNN extension it declares, and cap the explored
 * words at stable-letter degree `t_cap`.
 *
 * # Safety
 * As for `graev_system_new`.
 */
enum GraevStatus graev_hnn_new(const char *text, int64_t t_cap, struct GraevHnn **out);

/**
 * Release a handle created by `graev_hnn_new`. NULL is a no-op.
 *
 * # Safety
 * `h` must come from `graev_hnn_new` and not be used afterwards.
 */
void graev_hnn_free(struct GraevHnn *h);

/**
 * The distance between two stable-letter words in the HNN extension,
 * minimized over representing pairs of length at most `max_len`.
 *
 * # Safety
 * As for `graev_system_distance`.
 */
enum GraevStatus graev_hnn_distance(const struct GraevHnn *h,
                                    const char *f,
                                    const char *g,
                                    uintptr_t max_len,
                                    struct GraevRational *out);

/**
 * Validate everything `text` declares. Returns `Ok` when every check
 * passes, `MathError` with the first failing report otherwise, or
 * `ParseError` if the text does not parse.
 *
 * # Safety
 * `text` must be NUL-terminated UTF-8 (or NULL, which fails cleanly).
 */
enum GraevStatus graev_validate(const char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAEV_H */
