/* Copyright 2026 The mvlf Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the mvlf load forecaster. Every function returns an
 * mvlf_status; on failure mvlf_last_error() describes the cause for the
 * calling thread. Handles are opaque and owned by the caller, who releases
 * them with the matching _free function. Strings returned through char**
 * are released with mvlf_string_free.
 */

#ifndef MVLF_MVLF_H_
#define MVLF_MVLF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MVLF_API __declspec(dllexport)
#else
#define MVLF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvlf_status {
  MVLF_OK = 0,
  MVLF_E_ARGUMENT = 1,
  MVLF_E_IO = 2,
  MVLF_E_PARSE = 3,
  MVLF_E_SCHEMA = 4,
  MVLF_E_CONFIG = 5,
  MVLF_E_STATE = 6,
  MVLF_E_FINGERPRINT = 7,
  MVLF_E_DATA = 8,
  MVLF_E_NUMERIC = 9,
  MVLF_E_DIMENSION = 10,
  MVLF_E_INTERNAL = 99
} mvlf_status;

typedef struct mvlf_frame mvlf_frame;
typedef struct mvlf_model mvlf_model;
typedef struct mvlf_config mvlf_config;

typedef void (*mvlf_log_fn)(const char* line, void* user);

MVLF_API const char* mvlf_version(void);
MVLF_API const char* mvlf_last_error(void);
MVLF_API const char* mvlf_status_name(mvlf_status status);
MVLF_API void mvlf_string_free(char* text);

/* Frames. schema_json may be NULL for the default hourly schema. */
MVLF_API mvlf_status mvlf_frame_load_csv(const char* path, const char* schema_json, mvlf_frame** out);
MVLF_API mvlf_status mvlf_frame_synth(int days, uint64_t seed, mvlf_frame** out);
MVLF_API mvlf_status mvlf_frame_derive_calendar(const mvlf_frame* frame, const char* region_path, mvlf_frame** out);
MVLF_API mvlf_status mvlf_frame_inject_noise(const mvlf_frame* frame, double probability, uint64_t seed,
                                            mvlf_frame** out);
MVLF_API mvlf_status mvlf_frame_write_csv(const mvlf_frame* frame, const char* path);
MVLF_API mvlf_status mvlf_frame_shape(const mvlf_frame* frame, size_t* rows, size_t* features);
MVLF_API mvlf_status mvlf_frame_feature_name(const mvlf_frame* frame, size_t feature, char** out);
/* Writes NaN for missing cells. */
MVLF_API mvlf_status mvlf_frame_value(const mvlf_frame* frame, size_t row, size_t feature, double* out);
MVLF_API void mvlf_frame_free(mvlf_frame* frame);

/* Trained models. */
MVLF_API mvlf_status mvlf_model_load(const char* checkpoint_path, mvlf_model** out);
MVLF_API mvlf_status mvlf_model_param_count(const mvlf_model* model, size_t* total);
/* Forecasts `horizon` raw-unit values after anchor `t0_iso` into `out`,
 * which must hold `horizon` doubles. The frame must carry the model's views. */
MVLF_API mvlf_status mvlf_model_forecast(const mvlf_model* model, const mvlf_frame* frame, const char* t0_iso,
                                        int horizon, double* out);
MVLF_API void mvlf_model_free(mvlf_model* model);

/* Run configurations. `patch_json` (may be NULL) is a JSON merge patch
 * applied on top of the file. */
MVLF_API mvlf_status mvlf_config_load(const char* path, const char* patch_json, mvlf_config** out);
MVLF_API mvlf_status mvlf_config_to_json(const mvlf_config* config, char** out);
MVLF_API void mvlf_config_free(mvlf_config* config);

/* Pipelines writing into the configured output directory. */
MVLF_API mvlf_status mvlf_run_ingest(const mvlf_config* config, mvlf_log_fn log, void* user);
MVLF_API mvlf_status mvlf_run_train(const mvlf_config* config, int resume, mvlf_log_fn log, void* user);
MVLF_API mvlf_status mvlf_run_evaluate(const mvlf_config* config, mvlf_log_fn log, void* user);
/* t0_iso may be NULL for the start of the test range. */
MVLF_API mvlf_status mvlf_run_forecast(const mvlf_config* config, const char* t0_iso, mvlf_log_fn log, void* user);
MVLF_API mvlf_status mvlf_run_explain(const mvlf_config* config, mvlf_log_fn log, void* user);
MVLF_API mvlf_status mvlf_run_cv(const mvlf_config* config, mvlf_log_fn log, void* user);
MVLF_API mvlf_status mvlf_run_synth(int days, uint64_t seed, const char* out_dir);
MVLF_API mvlf_status mvlf_run_perturb(const char* input, const char* output, const char* schema_json,
                                     double probability, uint64_t seed);
/* CSV table of parameter counts; methods is "all" or one method name.
 * config may be NULL for the default schema and dimensions. */
MVLF_API mvlf_status mvlf_params_table(const mvlf_config* config, const char* methods, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MVLF_MVLF_H_ */
