/* Copyright 2026 The mvlf Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Exercises the C interface from plain C. Argument: a scratch directory.
 */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "mvlf/mvlf.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

#define EXPECT_OK(call)                                                                      \
  do {                                                                                       \
    mvlf_status s_ = (call);                                                                 \
    if (s_ != MVLF_OK) {                                                                     \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #call, mvlf_status_name(s_), \
              mvlf_last_error());                                                            \
      ++failures;                                                                            \
    }                                                                                        \
  } while (0)

static void log_line(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

static void frames(const char* dir) {
  mvlf_frame* raw = NULL;
  mvlf_frame* cal = NULL;
  mvlf_frame* again = NULL;
  mvlf_frame* noisy = NULL;
  size_t rows = 0, features = 0;
  char* name = NULL;
  double v = 0.0;
  char path[1024];

  EXPECT_OK(mvlf_frame_synth(20, 1, &raw));
  EXPECT_OK(mvlf_frame_shape(raw, &rows, &features));
  EXPECT(rows == 480);
  EXPECT(features == 8);
  EXPECT_OK(mvlf_frame_feature_name(raw, 0, &name));
  EXPECT(name && strcmp(name, "load") == 0);
  mvlf_string_free(name);
  EXPECT_OK(mvlf_frame_value(raw, 0, 0, &v));
  EXPECT(v > 0.0);
  EXPECT(mvlf_frame_value(raw, rows, 0, &v) == MVLF_E_ARGUMENT);

  EXPECT_OK(mvlf_frame_derive_calendar(raw, NULL, &cal));
  EXPECT_OK(mvlf_frame_shape(cal, &rows, &features));
  EXPECT(features == 14);
  EXPECT(mvlf_frame_derive_calendar(cal, NULL, &again) == MVLF_E_STATE);
  EXPECT(again == NULL);
  EXPECT(strlen(mvlf_last_error()) > 0);

  EXPECT_OK(mvlf_frame_inject_noise(raw, 0.5, 3, &noisy));
  snprintf(path, sizeof path, "%s/noisy.csv", dir);
  EXPECT_OK(mvlf_frame_write_csv(noisy, path));
  mvlf_frame_free(noisy);
  noisy = NULL;
  EXPECT_OK(mvlf_frame_load_csv(path, NULL, &noisy));
  EXPECT_OK(mvlf_frame_shape(noisy, &rows, &features));
  EXPECT(rows == 480);

  EXPECT(mvlf_frame_load_csv("/nonexistent/x.csv", NULL, &again) == MVLF_E_IO);
  EXPECT(mvlf_frame_load_csv(path, "{", &again) == MVLF_E_CONFIG);
  EXPECT(mvlf_frame_shape(NULL, &rows, &features) == MVLF_E_ARGUMENT);
  EXPECT(strstr(mvlf_last_error(), "NULL") != NULL);
  EXPECT(mvlf_frame_inject_noise(raw, 1.5, 3, &again) == MVLF_E_ARGUMENT);

  mvlf_frame_free(noisy);
  mvlf_frame_free(cal);
  mvlf_frame_free(raw);
  mvlf_frame_free(NULL);
}

static void pipeline(const char* dir) {
  char path[1024], ckpt[1024];
  FILE* f;
  mvlf_config* config = NULL;
  mvlf_config* changed = NULL;
  mvlf_model* model = NULL;
  mvlf_frame* raw = NULL;
  mvlf_frame* frame = NULL;
  char* text = NULL;
  size_t count = 0;
  double out[48];
  int lines = 0;
  int i;

  EXPECT_OK(mvlf_run_synth(120, 4, dir));
  snprintf(path, sizeof path, "%s/run.json", dir);
  f = fopen(path, "w");
  EXPECT(f != NULL);
  if (!f) return;
  fputs("{\"dataset\": {\"path\": \"data.csv\"}, \"model\": {\"method\": \"svd\", \"ffn_width\": 8},"
        " \"train\": {\"epochs\": 2, \"max_lag\": 24, \"train_stride\": 24, \"val_stride\": 24,"
        " \"split\": {\"test_months\": 1, \"validation_months\": 1, \"train_months\": 2}},"
        " \"evaluate\": {\"horizons\": [24]}, \"output\": \"out\"}",
        f);
  fclose(f);

  EXPECT_OK(mvlf_config_load(path, NULL, &config));
  EXPECT_OK(mvlf_config_to_json(config, &text));
  EXPECT(text && strstr(text, "\"svd\"") != NULL);
  mvlf_string_free(text);
  EXPECT_OK(mvlf_run_train(config, 0, log_line, &lines));
  EXPECT(lines == 2);
  EXPECT_OK(mvlf_run_evaluate(config, NULL, NULL));
  EXPECT_OK(mvlf_run_forecast(config, NULL, NULL, NULL));

  snprintf(ckpt, sizeof ckpt, "%s/out/model.ckpt", dir);
  EXPECT_OK(mvlf_model_load(ckpt, &model));
  EXPECT_OK(mvlf_model_param_count(model, &count));
  EXPECT(count > 0);
  snprintf(path, sizeof path, "%s/data.csv", dir);
  EXPECT_OK(mvlf_frame_load_csv(path, NULL, &raw));
  EXPECT_OK(mvlf_frame_derive_calendar(raw, NULL, &frame));
  EXPECT_OK(mvlf_model_forecast(model, frame, "2012-03-15T00:00:00Z", 48, out));
  for (i = 0; i < 48; ++i) EXPECT(isfinite(out[i]) && out[i] > 0.0);
  EXPECT(mvlf_model_forecast(model, frame, "2012-03-15T00:00:00Z", 36, out) == MVLF_E_ARGUMENT);
  EXPECT(mvlf_model_forecast(model, raw, "2012-03-15T00:00:00Z", 24, out) == MVLF_E_SCHEMA);
  EXPECT(mvlf_model_forecast(model, frame, "not a time", 24, out) == MVLF_E_PARSE);

  snprintf(path, sizeof path, "%s/run.json", dir);
  EXPECT_OK(mvlf_config_load(path, "{\"train\": {\"lr\": 0.5}}", &changed));
  EXPECT(mvlf_run_evaluate(changed, NULL, NULL) == MVLF_E_FINGERPRINT);
  EXPECT(mvlf_config_load("/nonexistent/run.json", NULL, &changed) == MVLF_E_IO);

  EXPECT_OK(mvlf_params_table(NULL, "all", &text));
  EXPECT(text && strncmp(text, "method,", 7) == 0);
  mvlf_string_free(text);
  EXPECT(mvlf_params_table(NULL, "median", &text) == MVLF_E_CONFIG);

  mvlf_frame_free(frame);
  mvlf_frame_free(raw);
  mvlf_model_free(model);
  mvlf_config_free(changed);
  mvlf_config_free(config);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_work";
  mkdir(dir, 0755);
  EXPECT(strlen(mvlf_version()) > 0);
  EXPECT(strcmp(mvlf_status_name(MVLF_E_FINGERPRINT), "fingerprint") == 0);
  frames(dir);
  pipeline(dir);
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("capi: all checks passed");
  return 0;
}
