#ifndef LEVELSET_LAB_H
#define LEVELSET_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LslStatus {
  LSL_STATUS_OK = 0,
  /**
   * Parameters or inputs violate a precondition.
   */
  LSL_STATUS_VALIDATION = 1,
  /**
   * The computation failed (instability, too few samples or scales).
   */
  LSL_STATUS_NUMERICAL = 2,
  /**
   * File system or serialization failure.
   */
  LSL_STATUS_IO = 3,
  LSL_STATUS_NULL_POINTER = 4,
  /**
   * A string argument is not valid UTF-8 or an index is out of range.
   */
  LSL_STATUS_INVALID_ARGUMENT = 5,
  LSL_STATUS_PANIC = 6,
} LslStatus;

/**
 * Experiment configuration.
 */
typedef struct LslConfig LslConfig;

/**
 * Field sampled on a uniform grid, row-major with `x1` as the row index.
 */
typedef struct LslGrid LslGrid;

/**
 * Summary of a finished experiment.
 */
typedef struct LslSummary LslSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next call on the same thread.
 */
const char *lsl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lsl_version(void);

/**
 * Default configuration. Never returns null.
 */
struct LslConfig *lsl_config_new_default(void);

/**
 * Loads a config file or a run manifest.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LslStatus lsl_config_load(const char *path, struct LslConfig **out);

/**
 * Sets one `section.key` to `value`, as in the config file format.
 *
 * # Safety
 * `cfg` must come from this library; `key` and `value` must be NUL-terminated.
 */
enum LslStatus lsl_config_set(struct LslConfig *cfg, const char *key, const char *value);

/**
 * Canonical text of the configuration; release with [`lsl_string_free`].
 *
 * # Safety
 * `cfg` must come from this library and `out` must be valid.
 */
enum LslStatus lsl_config_to_text(const struct LslConfig *cfg, char **out);

/**
 * # Safety
 * `cfg` must come from this library or be null; it must not be used afterwards.
 */
void lsl_config_free(struct LslConfig *cfg);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void lsl_string_free(char *s);

/**
 * Runs the linear experiment, writing its outputs to the configured directory.
 *
 * # Safety
 * `cfg` must come from this library and `out` must be valid.
 */
enum LslStatus lsl_run_linear(const struct LslConfig *cfg, struct LslSummary **out);

/**
 * Runs the nonlinear experiment, writing its outputs to the configured directory.
 *
 * # Safety
 * `cfg` must come from this library and `out` must be valid.
 */
enum LslStatus lsl_run_nonlinear(const struct LslConfig *cfg, struct LslSummary **out);

/**
 * Number of configured levels. Returns 0 for a null handle.
 *
 * # Safety
 * `s` must come from this library or be null.
 */
size_t lsl_summary_level_count(const struct LslSummary *s);

/**
 * Level value, median slope and empty fraction of level `index`.
 * The median is NaN when every level set was empty.
 *
 * # Safety
 * `s` must come from this library; the output pointers must be valid.
 */
enum LslStatus lsl_summary_level(const struct LslSummary *s,
                                 size_t index,
                                 double *y,
                                 double *median_slope,
                                 double *empty_fraction);

/**
 * 1 if every acceptance check of the run passed, 0 otherwise (or for null).
 *
 * # Safety
 * `s` must come from this library or be null.
 */
int lsl_summary_passed(const struct LslSummary *s);

/**
 * The summary as JSON; release with [`lsl_string_free`].
 *
 * # Safety
 * `s` must come from this library and `out` must be valid.
 */
enum LslStatus lsl_summary_json(const struct LslSummary *s, char **out);

/**
 * # Safety
 * `s` must come from this library or be null; it must not be used afterwards.
 */
void lsl_summary_free(struct LslSummary *s);

/**
 * Exact sample of the linear field for `replica` at the configured time,
 * synthesized on the solver grid.
 *
 * # Safety
 * `cfg` must come from this library and `out` must be valid.
 */
enum LslStatus lsl_sample_linear_field(const struct LslConfig *cfg,
                                       uint64_t replica,
                                       struct LslGrid **out);

/**
 * Copies `n * n` row-major values into a new grid handle.
 *
 * # Safety
 * `values` must point to `n * n` doubles and `out` must be valid.
 */
enum LslStatus lsl_grid_new(size_t n, const double *values, struct LslGrid **out);

/**
 * Grid resolution, or 0 for null.
 *
 * # Safety
 * `g` must come from this library or be null.
 */
size_t lsl_grid_resolution(const struct LslGrid *g);

/**
 * Borrowed pointer to the `n * n` values, valid while the handle lives; null for null.
 *
 * # Safety
 * `g` must come from this library or be null.
 */
const double *lsl_grid_values(const struct LslGrid *g);

/**
 * Box-counting slope of the level set `{g = level}` over the default scale
 * window. `LSL_STATUS_NUMERICAL` when the level set is empty.
 *
 * # Safety
 * `g` must come from this library and `slope` must be valid.
 */
enum LslStatus lsl_grid_level_dimension(const struct LslGrid *g, double level, double *slope);

/**
 * # Safety
 * `g` must come from this library or be null; it must not be used afterwards.
 */
void lsl_grid_free(struct LslGrid *g);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVELSET_LAB_H */
