#ifndef SCPIZZA_H
#define SCPIZZA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScpStatus {
  SCP_STATUS_OK = 0,
  SCP_STATUS_NULL_ARGUMENT = 1,
  SCP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON or numeral, or an instance that fails validation.
   */
  SCP_STATUS_INVALID_INPUT = 3,
  /**
   * Wrong point length or an output buffer that is too small.
   */
  SCP_STATUS_BAD_LENGTH = 4,
  /**
   * The solver returned a point that did not verify; the report is still written.
   */
  SCP_STATUS_NOT_VERIFIED = 5,
  SCP_STATUS_PANIC = 6,
} ScpStatus;

/**
 * Opaque instance handle: the normalized instance and its compiled measure function.
 */
typedef struct ScpInstance ScpInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Never null; empty if none.
 */
const char *scp_last_error(void);

const char *scp_version(void);

/**
 * Parses an instance document, normalizes it into the unit square and
 * compiles it.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScpStatus scp_instance_from_json(const char *json, struct ScpInstance **out);

/**
 * # Safety
 * `inst` must come from `scp_instance_from_json` and not be freed twice. Null is ignored.
 */
void scp_instance_free(struct ScpInstance *inst);

/**
 * Number of colors, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
uintptr_t scp_instance_colors(const struct ScpInstance *inst);

/**
 * Side-A masses `f(p)` in f64. `out` must hold one value per color.
 *
 * # Safety
 * `point` must hold `len` doubles and `out` `out_len` doubles.
 */
enum ScpStatus scp_eval_f64(const struct ScpInstance *inst,
                            const double *point,
                            uintptr_t len,
                            double *out,
                            uintptr_t out_len);

/**
 * Exact `f(p)` for a point given as `len` numerals (`"3/4"`, `"-2"`, `"0.5"`).
 * Writes a JSON array of `"p/q"` strings.
 *
 * # Safety
 * `coords` must hold `len` NUL-terminated strings and `out` be a valid pointer.
 */
enum ScpStatus scp_eval_exact(const struct ScpInstance *inst,
                              const char *const *coords,
                              uintptr_t len,
                              char **out);

/**
 * Float residual `‖f(p) − f(−p)‖∞`.
 *
 * # Safety
 * `point` must hold `len` doubles and `out` be a valid pointer.
 */
enum ScpStatus scp_residual_f64(const struct ScpInstance *inst,
                                const double *point,
                                uintptr_t len,
                                double *out);

/**
 * Searches for a point with residual at most `epsilon` (a numeral) using
 * `turns` turns (`n − 1` if negative). Writes a JSON report with the exact
 * point; returns `SCP_NOT_VERIFIED` if the best point misses `epsilon`.
 *
 * # Safety
 * `epsilon` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScpStatus scp_solve(const struct ScpInstance *inst,
                         const char *epsilon,
                         int32_t turns,
                         uint64_t seed,
                         char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void scp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCPIZZA_H */
