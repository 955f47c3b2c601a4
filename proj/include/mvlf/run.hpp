// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Declarative run configuration and the batch pipelines behind the CLI.
//
// A run config is one JSON document:
//
//   {
//     "dataset":  {"path": "load.csv", "schema": "default", "region": "ontario.json"},
//     "model":    {"method": "svd"},
//     "train":    {"epochs": 300, "split": {"test_months": 12}},
//     "evaluate": {"horizons": [24, 48, 168], "stride": 24, "range": "test"},
//     "forecast": {"horizon": 24},
//     "explain":  {"horizon": 24, "range": "test"},
//     "cv":       {"train_months": 2, "test_months": 1, "step_months": 1},
//     "seed": 0,
//     "output": "runs/svd"
//   }
//
// Every section is optional; relative paths resolve against the directory
// of the config file.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvlf/evaluation.hpp"
#include "mvlf/explain.hpp"
#include "mvlf/frame.hpp"
#include "mvlf/model.hpp"
#include "mvlf/training.hpp"

namespace mvlf {

struct RangeSpec {
  std::string split = "test";  // test | validation | train | all, or explicit
  std::optional<TimeRange> explicit_range;
};

struct RunConfig {
  std::string dataset;
  std::vector<FeatureSpec> schema = default_schema();
  std::string region;  // empty = built-in calendar
  bool forward_fill = false;
  ModelConfig model = ModelConfig::defaults(Aggregation::kSvd);
  TrainConfig train;
  EvalConfig eval;
  RangeSpec eval_range;
  int forecast_horizon = 24;
  std::vector<ViewGroup> groups;  // empty = default panels
  int explain_horizon = 24;
  RangeSpec explain_range;
  int cv_train_months = 2;
  int cv_test_months = 1;
  int cv_step_months = 1;
  std::uint64_t seed = 0;
  std::string output = "run";
};

/// Reads the config at `path`. `patch` is an optional JSON merge patch
/// applied before interpretation (command-line overrides).
RunConfig load_run_config(const std::string& path, const std::string& patch = "");
RunConfig run_config_from_json(const std::string& text, const std::string& base_dir, const std::string& patch = "");
/// Fully resolved config with absolute paths; parses back to an equal run.
std::string run_config_to_json(const RunConfig& config);

using LogFn = std::function<void(const std::string&)>;

/// Raw dataset with calendar views derived.
TimeSeriesFrame load_dataset(const RunConfig& config);

std::string checkpoint_path(const RunConfig& config);

void run_ingest(const RunConfig& config, const LogFn& log = {});
void run_train(const RunConfig& config, bool resume, const LogFn& log = {});
void run_evaluate(const RunConfig& config, const LogFn& log = {});
void run_forecast(const RunConfig& config, std::optional<Timestamp> t0, const LogFn& log = {});
void run_explain(const RunConfig& config, const LogFn& log = {});
void run_cv(const RunConfig& config, const LogFn& log = {});
void run_synth(int days, std::uint64_t seed, const std::string& out_dir);
void run_perturb(const std::string& input, const std::string& output, const std::vector<FeatureSpec>& schema,
                 double probability, std::uint64_t seed);
/// method,d,embeddings,gates,encoder,decoder,head,total for each requested
/// method ("all" or one name) over the schema plus calendar views.
std::string params_table(const std::vector<FeatureSpec>& schema, const std::string& methods,
                         const std::optional<ModelConfig>& base = std::nullopt);

/// Writes through a temporary file and rename.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace mvlf
