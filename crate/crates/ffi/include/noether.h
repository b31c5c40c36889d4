#ifndef NOETHER_H
#define NOETHER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. Non-negative values match the command-line exit
 * codes; negative values are interface misuse.
 */
typedef enum NoetherStatus {
  NOETHER_STATUS_OK = 0,
  /**
   * Malformed input, unknown name or unknown command.
   */
  NOETHER_STATUS_INPUT = 2,
  /**
   * The computation itself failed, e.g. headroom overflow.
   */
  NOETHER_STATUS_DOMAIN = 3,
  /**
   * A claim was refuted: not a symmetry, failed identity, and so on.
   */
  NOETHER_STATUS_REFUTED = 4,
  NOETHER_STATUS_NULL_ARGUMENT = -1,
  NOETHER_STATUS_INVALID_UTF8 = -2,
  NOETHER_STATUS_PANIC = -3,
} NoetherStatus;

/**
 * A parsed problem file.
 */
typedef struct NoetherProblem NoetherProblem;

/**
 * Run configuration. Obtain defaults from [`noether_options_default`].
 */
typedef struct NoetherOptions {
  uint64_t seed;
  /**
   * Random evaluation points per certificate; zero is treated as one.
   */
  uint64_t trials;
  /**
   * Derivative headroom; zero selects the automatic bound.
   */
  uint32_t max_order;
  /**
   * `key=value` records instead of `key: value` text.
   */
  bool records;
} NoetherOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: seed 0, 16 trials, automatic headroom, text output.
 */
struct NoetherOptions noether_options_default(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *noether_version(void);

/**
 * Parses problem-file text. Only `max_order` is read from `options`, which
 * may be null. On success `*out` receives a handle for
 * [`noether_problem_free`]; otherwise it is set to null.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer, and
 * `options` null or valid.
 */
enum NoetherStatus noether_problem_parse(const char *text,
                                         const struct NoetherOptions *options,
                                         struct NoetherProblem **out);

/**
 * Releases a handle from [`noether_problem_parse`]. Null is ignored.
 *
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void noether_problem_free(struct NoetherProblem *problem);

/**
 * Runs one command, given as the command-line words without the file, e.g.
 * `{"current", "L", "time", "--normal", "N"}`. `options` may be null.
 *
 * Whenever the status is non-negative `*report` receives the rendered
 * report, including for refuted claims; release it with
 * [`noether_string_free`]. On interface errors it is set to null.
 *
 * # Safety
 * `problem` must be a live handle, `argv` must point to `argc`
 * NUL-terminated strings, `report` must be valid and `options` null or
 * valid.
 */
enum NoetherStatus noether_run(const struct NoetherProblem *problem,
                               const char *const *argv,
                               size_t argc,
                               const struct NoetherOptions *options,
                               char **report);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void noether_string_free(char *s);

/**
 * Message for the latest failure on this thread, or null. The pointer is
 * valid until the next call into the library from the same thread.
 */
const char *noether_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOETHER_H */
