// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/mvlf.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "mvlf/calendar.hpp"
#include "mvlf/error.hpp"
#include "mvlf/evaluation.hpp"
#include "mvlf/run.hpp"
#include "mvlf/synth.hpp"

struct mvlf_frame {
  mvlf::TimeSeriesFrame frame;
};

struct mvlf_model {
  mvlf::TrainedModel model;
};

struct mvlf_config {
  mvlf::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
mvlf_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MVLF_OK;
  } catch (const mvlf::Error& e) {
    g_last_error = e.what();
    return static_cast<mvlf_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MVLF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MVLF_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) mvlf::fail(mvlf::ErrorCode::kArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mvlf::LogFn make_log(mvlf_log_fn log, void* user) {
  if (!log) return {};
  return [log, user](const std::string& line) { log(line.c_str(), user); };
}

std::vector<mvlf::FeatureSpec> schema_or_default(const char* schema_json) {
  return schema_json ? mvlf::schema_from_json(schema_json) : mvlf::default_schema();
}

}  // namespace

extern "C" {

const char* mvlf_version(void) { return "0.1.0"; }

const char* mvlf_last_error(void) { return g_last_error.c_str(); }

const char* mvlf_status_name(mvlf_status status) {
  if (status == MVLF_OK) return "ok";
  return mvlf::to_string(static_cast<mvlf::ErrorCode>(status));
}

void mvlf_string_free(char* text) { delete[] text; }

mvlf_status mvlf_frame_load_csv(const char* path, const char* schema_json, mvlf_frame** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mvlf_frame{mvlf::load_csv(path, schema_or_default(schema_json))};
  });
}

mvlf_status mvlf_frame_synth(int days, uint64_t seed, mvlf_frame** out) {
  return guarded([&] {
    require(out, "out");
    mvlf::SynthOptions o;
    o.days = days;
    o.seed = seed;
    *out = new mvlf_frame{mvlf::synth_generate(o)};
  });
}

mvlf_status mvlf_frame_derive_calendar(const mvlf_frame* frame, const char* region_path, mvlf_frame** out) {
  return guarded([&] {
    require(frame, "frame");
    require(out, "out");
    const auto region = region_path ? mvlf::RegionCalendar::load(region_path) : mvlf::RegionCalendar::builtin();
    *out = new mvlf_frame{mvlf::derive_calendar_views(frame->frame, region)};
  });
}

mvlf_status mvlf_frame_inject_noise(const mvlf_frame* frame, double probability, uint64_t seed, mvlf_frame** out) {
  return guarded([&] {
    require(frame, "frame");
    require(out, "out");
    *out = new mvlf_frame{mvlf::inject_noise(frame->frame, probability, seed)};
  });
}

mvlf_status mvlf_frame_write_csv(const mvlf_frame* frame, const char* path) {
  return guarded([&] {
    require(frame, "frame");
    require(path, "path");
    mvlf::write_csv(frame->frame, path);
  });
}

mvlf_status mvlf_frame_shape(const mvlf_frame* frame, size_t* rows, size_t* features) {
  return guarded([&] {
    require(frame, "frame");
    if (rows) *rows = frame->frame.rows();
    if (features) *features = frame->frame.features();
  });
}

mvlf_status mvlf_frame_feature_name(const mvlf_frame* frame, size_t feature, char** out) {
  return guarded([&] {
    require(frame, "frame");
    require(out, "out");
    if (feature >= frame->frame.features()) mvlf::fail(mvlf::ErrorCode::kArgument, "feature index out of range");
    *out = dup_string(frame->frame.spec(feature).name);
  });
}

mvlf_status mvlf_frame_value(const mvlf_frame* frame, size_t row, size_t feature, double* out) {
  return guarded([&] {
    require(frame, "frame");
    require(out, "out");
    if (row >= frame->frame.rows() || feature >= frame->frame.features()) {
      mvlf::fail(mvlf::ErrorCode::kArgument, "cell index out of range");
    }
    *out = frame->frame.missing(row, feature) ? std::numeric_limits<double>::quiet_NaN()
                                              : frame->frame.value(row, feature);
  });
}

void mvlf_frame_free(mvlf_frame* frame) { delete frame; }

mvlf_status mvlf_model_load(const char* checkpoint_path, mvlf_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new mvlf_model{mvlf::load_checkpoint(checkpoint_path).best()};
  });
}

mvlf_status mvlf_model_param_count(const mvlf_model* model, size_t* total) {
  return guarded([&] {
    require(model, "model");
    require(total, "total");
    *total = model->model.params.scalar_count();
  });
}

mvlf_status mvlf_model_forecast(const mvlf_model* model, const mvlf_frame* frame, const char* t0_iso, int horizon,
                                double* out) {
  return guarded([&] {
    require(model, "model");
    require(frame, "frame");
    require(t0_iso, "t0_iso");
    require(out, "out");
    const mvlf::ModelPredictor p(model->model);
    if (horizon < 1 || horizon % p.chunk() != 0) {
      mvlf::fail(mvlf::ErrorCode::kArgument, "horizon must be a positive multiple of " + std::to_string(p.chunk()));
    }
    const auto values = p.rollout(p.prepare(frame->frame), mvlf::Timestamp::parse_iso(t0_iso), horizon);
    std::copy(values.begin(), values.end(), out);
  });
}

void mvlf_model_free(mvlf_model* model) { delete model; }

mvlf_status mvlf_config_load(const char* path, const char* patch_json, mvlf_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mvlf_config{mvlf::load_run_config(path, patch_json ? patch_json : "")};
  });
}

mvlf_status mvlf_config_to_json(const mvlf_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = dup_string(mvlf::run_config_to_json(config->config));
  });
}

void mvlf_config_free(mvlf_config* config) { delete config; }

mvlf_status mvlf_run_ingest(const mvlf_config* config, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    mvlf::run_ingest(config->config, make_log(log, user));
  });
}

mvlf_status mvlf_run_train(const mvlf_config* config, int resume, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    mvlf::run_train(config->config, resume != 0, make_log(log, user));
  });
}

mvlf_status mvlf_run_evaluate(const mvlf_config* config, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    mvlf::run_evaluate(config->config, make_log(log, user));
  });
}

mvlf_status mvlf_run_forecast(const mvlf_config* config, const char* t0_iso, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    std::optional<mvlf::Timestamp> t0;
    if (t0_iso) t0 = mvlf::Timestamp::parse_iso(t0_iso);
    mvlf::run_forecast(config->config, t0, make_log(log, user));
  });
}

mvlf_status mvlf_run_explain(const mvlf_config* config, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    mvlf::run_explain(config->config, make_log(log, user));
  });
}

mvlf_status mvlf_run_cv(const mvlf_config* config, mvlf_log_fn log, void* user) {
  return guarded([&] {
    require(config, "config");
    mvlf::run_cv(config->config, make_log(log, user));
  });
}

mvlf_status mvlf_run_synth(int days, uint64_t seed, const char* out_dir) {
  return guarded([&] {
    require(out_dir, "out_dir");
    mvlf::run_synth(days, seed, out_dir);
  });
}

mvlf_status mvlf_run_perturb(const char* input, const char* output, const char* schema_json, double probability,
                             uint64_t seed) {
  return guarded([&] {
    require(input, "input");
    require(output, "output");
    mvlf::run_perturb(input, output, schema_or_default(schema_json), probability, seed);
  });
}

mvlf_status mvlf_params_table(const mvlf_config* config, const char* methods, char** out) {
  return guarded([&] {
    require(out, "out");
    const std::string which = methods ? methods : "all";
    if (config) {
      *out = dup_string(mvlf::params_table(config->config.schema, which, config->config.model));
    } else {
      *out = dup_string(mvlf::params_table(mvlf::default_schema(), which));
    }
  });
}

}  // extern "C"
