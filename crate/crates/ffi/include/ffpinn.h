#ifndef FFPINN_H
#define FFPINN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Result code of every fallible call.
 */
typedef enum FfpinnStatus {
  FFPINN_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  FFPINN_STATUS_NULL_POINTER = 1,
  /**
   * Invalid configuration or argument (bad JSON, unknown key, wrong
   * buffer length, non-UTF-8 string, size over a cap).
   */
  FFPINN_STATUS_VALIDATION = 2,
  /**
   * Non-finite loss, overflow, solver blow-up and similar.
   */
  FFPINN_STATUS_NUMERICAL = 3,
  /**
   * File system or serialization failure.
   */
  FFPINN_STATUS_IO = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  FFPINN_STATUS_PANIC = 5,
  /**
   * Lookup of an unknown name.
   */
  FFPINN_STATUS_NOT_FOUND = 6,
  /**
   * Anything else.
   */
  FFPINN_STATUS_INTERNAL = 7,
} FfpinnStatus;

/**
 * A parsed experiment configuration.
 */
typedef struct FfpinnConfig FfpinnConfig;

/**
 * A network with its parameters.
 */
typedef struct FfpinnNetwork FfpinnNetwork;

/**
 * The record of a finished run.
 */
typedef struct FfpinnRecord FfpinnRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *ffpinn_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call into the library on this thread.
 */
const char *ffpinn_last_error_message(void);

/**
 * Frees a string returned through a `char **` out-parameter. NULL is a
 * no-op.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ffpinn_string_free(char *s);

/**
 * Newline-separated benchmark ids.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FfpinnStatus ffpinn_benchmark_list(char **out);

/**
 * Equation and default scales of a benchmark.
 *
 * # Safety
 * `id` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_benchmark_describe(const char *id, char **out);

/**
 * Parses a JSON configuration. Validation happens when it is run; call
 * [`ffpinn_config_validate`] to check earlier.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_config_from_json(const char *json, struct FfpinnConfig **out);

/**
 * Loads one of the built-in presets.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_config_from_preset(const char *name, struct FfpinnConfig **out);

/**
 * Sets the experiment and training seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum FfpinnStatus ffpinn_config_set_seed(struct FfpinnConfig *config, uint64_t seed);

/**
 * Sets the number of training iterations (PINN tasks) or epochs
 * (regression).
 *
 * # Safety
 * `config` must be a live handle.
 */
enum FfpinnStatus ffpinn_config_set_iterations(struct FfpinnConfig *config, uint64_t iterations);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum FfpinnStatus ffpinn_config_validate(const struct FfpinnConfig *config);

/**
 * Canonical JSON of the configuration.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_config_to_json(const struct FfpinnConfig *config, char **out);

/**
 * NULL is a no-op.
 *
 * # Safety
 * `config` must come from this library and not have been freed.
 */
void ffpinn_config_free(struct FfpinnConfig *config);

/**
 * Runs the configured task, writing artifacts into `out_dir`. A run that
 * aborts on a numerical failure still yields a record, with
 * [`ffpinn_record_succeeded`] false.
 *
 * # Safety
 * `config` must be a live handle, `out_dir` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_run(const struct FfpinnConfig *config,
                             const char *out_dir,
                             struct FfpinnRecord **out);

/**
 * False for a failed run or a NULL handle.
 *
 * # Safety
 * `record` must be NULL or a live handle.
 */
bool ffpinn_record_succeeded(const struct FfpinnRecord *record);

/**
 * # Safety
 * `record` must be a live handle and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_record_metric(const struct FfpinnRecord *record,
                                       const char *name,
                                       double *out);

/**
 * Number of metrics; 0 for NULL.
 *
 * # Safety
 * `record` must be NULL or a live handle.
 */
size_t ffpinn_record_metric_count(const struct FfpinnRecord *record);

/**
 * Name of metric `index` in sorted order, borrowed from the record.
 *
 * # Safety
 * `record` must be a live handle and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_record_metric_name(const struct FfpinnRecord *record,
                                            size_t index,
                                            const char **out);

/**
 * The record as written to `record.json`.
 *
 * # Safety
 * `record` must be a live handle and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_record_to_json(const struct FfpinnRecord *record, char **out);

/**
 * NULL is a no-op.
 *
 * # Safety
 * `record` must come from this library and not have been freed.
 */
void ffpinn_record_free(struct FfpinnRecord *record);

/**
 * Builds the configured architecture and initializes it from the config
 * seed, the same way a run does. PINN configs take their dimensions from
 * the benchmark; other tasks build a scalar network of one input.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum FfpinnStatus ffpinn_network_new(const struct FfpinnConfig *config, struct FfpinnNetwork **out);

/**
 * Any of the out pointers may be NULL.
 *
 * # Safety
 * `network` must be a live handle; non-NULL out pointers must be valid.
 */
enum FfpinnStatus ffpinn_network_dims(const struct FfpinnNetwork *network,
                                      size_t *input_dim,
                                      size_t *output_dim,
                                      size_t *n_params);

/**
 * Copies the parameters into `out`, which must hold exactly `n_params`.
 *
 * # Safety
 * `network` must be a live handle and `out` point to `len` doubles.
 */
enum FfpinnStatus ffpinn_network_get_params(const struct FfpinnNetwork *network,
                                            double *out,
                                            size_t len);

/**
 * Replaces the parameters; `len` must equal `n_params`.
 *
 * # Safety
 * `network` must be a live handle and `params` point to `len` doubles.
 */
enum FfpinnStatus ffpinn_network_set_params(struct FfpinnNetwork *network,
                                            const double *params,
                                            size_t len);

/**
 * Evaluates the network at `n_points` row-major points of `input_dim`
 * coordinates; `out` receives `n_points * output_dim` values.
 *
 * # Safety
 * `points` must hold `n_points * input_dim` doubles and `out` `out_len`.
 */
enum FfpinnStatus ffpinn_network_predict(const struct FfpinnNetwork *network,
                                         const double *points,
                                         size_t n_points,
                                         double *out,
                                         size_t out_len);

/**
 * Empirical NTK Gram matrix of the first output at `n_points` points,
 * row-major `n_points × n_points` into `out`. At most 1024 points.
 *
 * # Safety
 * `points` must hold `n_points * input_dim` doubles and `out` `out_len`.
 */
enum FfpinnStatus ffpinn_network_ntk(const struct FfpinnNetwork *network,
                                     const double *points,
                                     size_t n_points,
                                     double *out,
                                     size_t out_len);

/**
 * NULL is a no-op.
 *
 * # Safety
 * `network` must come from this library and not have been freed.
 */
void ffpinn_network_free(struct FfpinnNetwork *network);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FFPINN_H */
