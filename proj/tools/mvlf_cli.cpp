// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// mvlf command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvlf/mvlf.h"

namespace {

enum Exit {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitInvalid = 4,
  kExitFingerprint = 5,
  kExitData = 6,
  kExitNumeric = 7,
  kExitState = 8,
};

constexpr const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, bad value, missing argument)\n"
    "  3  missing or unreadable file\n"
    "  4  malformed config, schema or input file\n"
    "  5  config fingerprint mismatch (checkpoint from another config)\n"
    "  6  data error (too little history, bad values, uncovered forecast)\n"
    "  7  numeric failure (training diverged)\n"
    "  8  invalid state (e.g. model not fitted)\n";

int exit_code(mvlf_status s) {
  switch (s) {
    case MVLF_OK: return kExitOk;
    case MVLF_E_ARGUMENT: return kExitUsage;
    case MVLF_E_IO: return kExitIo;
    case MVLF_E_PARSE:
    case MVLF_E_SCHEMA:
    case MVLF_E_CONFIG: return kExitInvalid;
    case MVLF_E_FINGERPRINT: return kExitFingerprint;
    case MVLF_E_DATA:
    case MVLF_E_DIMENSION: return kExitData;
    case MVLF_E_NUMERIC: return kExitNumeric;
    case MVLF_E_STATE: return kExitState;
    default: return kExitInternal;
  }
}

int report(mvlf_status s) {
  if (s != MVLF_OK) std::fprintf(stderr, "mvlf: %s error: %s\n", mvlf_status_name(s), mvlf_last_error());
  return exit_code(s);
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method;
  std::optional<int> horizon;
  std::optional<int> max_lag;

  std::string patch() const {
    nlohmann::json p = nlohmann::json::object();
    if (seed) {
      p["seed"] = *seed;
      p["train"]["seed"] = *seed;
      p["evaluate"]["noise_seed"] = *seed;
    }
    if (!out.empty()) p["output"] = std::filesystem::absolute(out).lexically_normal().string();
    if (!method.empty()) {
      p["model"]["method"] = method;
      p["model"]["d"] = nullptr;
    }
    if (horizon) {
      p["evaluate"]["horizons"] = {*horizon};
      p["forecast"]["horizon"] = *horizon;
      p["explain"]["horizon"] = *horizon;
    }
    if (max_lag) p["train"]["max_lag"] = *max_lag;
    return p.dump();
  }
};

struct ConfigHandle {
  mvlf_config* ptr = nullptr;
  ~ConfigHandle() { mvlf_config_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view short-term load forecaster"};
  app.footer(kExitHelp);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Overrides ov;
  std::uint64_t seed_value = 0;
  int horizon_value = 0;
  int max_lag_value = 0;
  app.add_option("--config", config_path, "Run config file (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for training, noise and synthesis");
  app.add_option("--out", ov.out, "Output directory");
  app.add_option("--method", ov.method, "Aggregation method")->check(CLI::IsMember({"additive", "concatenative", "svd", "all"}));
  auto* horizon_opt =
      app.add_option("--horizon", horizon_value, "Forecast horizon in hours")->check(CLI::IsMember({24, 48, 168}));
  auto* max_lag_opt = app.add_option("--max-lag", max_lag_value, "Cap the lag set at this many hours")
                          ->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and write it with derived calendar views");
  auto* train = app.add_subcommand("train", "Train a model; writes model.ckpt and history.csv");
  bool resume = false;
  train->add_flag("--resume", resume, "Continue from the checkpoint in the output directory");
  auto* evaluate = app.add_subcommand("evaluate", "MAPE report per horizon and subset (report.csv, report.json)");
  auto* forecast = app.add_subcommand("forecast", "Write forecast.csv from an anchor hour");
  std::string t0;
  forecast->add_option("--t0", t0, "Anchor hour (ISO 8601); default: start of the test range");
  auto* explain = app.add_subcommand("explain", "View isolation panels, embedding dump and SVD analysis");
  auto* perturb = app.add_subcommand("perturb", "Write a noisy copy of a dataset");
  std::string input, output;
  double probability = 0.5;
  perturb->add_option("--input", input, "Dataset CSV")->required();
  perturb->add_option("--output", output, "Destination CSV")->required();
  perturb->add_option("--p", probability, "Replacement probability per exogenous cell")->check(CLI::Range(0.0, 1.0));
  auto* cv = app.add_subcommand("cv", "Rolling-window cross-validation (cv_folds.csv, cv_summary.csv)");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic hourly dataset (data.csv)");
  int days = 365;
  synth->add_option("--days", days, "Number of days")->check(CLI::Range(14, 36600));
  auto* params = app.add_subcommand("params", "Parameter counts per aggregation method");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) ov.seed = seed_value;
  if (*horizon_opt) ov.horizon = horizon_value;
  if (*max_lag_opt) ov.max_lag = max_lag_value;

  const bool is_params = params->parsed();
  if (ov.method == "all" && !is_params) {
    std::fprintf(stderr, "mvlf: usage error: --method all is only valid for params\n");
    return kExitUsage;
  }

  auto load_config = [&](ConfigHandle& h, bool required) -> int {
    if (config_path.empty()) {
      if (!required) return kExitOk;
      std::fprintf(stderr, "mvlf: usage error: --config is required for this command\n");
      return kExitUsage;
    }
    return report(mvlf_config_load(config_path.c_str(), ov.patch().c_str(), &h.ptr));
  };

  ConfigHandle cfg;
  if (ingest->parsed() || train->parsed() || evaluate->parsed() || forecast->parsed() || explain->parsed() ||
      cv->parsed()) {
    if (const int rc = load_config(cfg, true)) return rc;
  }
  if (ingest->parsed()) return report(mvlf_run_ingest(cfg.ptr, log_line, nullptr));
  if (train->parsed()) return report(mvlf_run_train(cfg.ptr, resume ? 1 : 0, log_line, nullptr));
  if (evaluate->parsed()) return report(mvlf_run_evaluate(cfg.ptr, log_line, nullptr));
  if (forecast->parsed()) {
    return report(mvlf_run_forecast(cfg.ptr, t0.empty() ? nullptr : t0.c_str(), log_line, nullptr));
  }
  if (explain->parsed()) return report(mvlf_run_explain(cfg.ptr, log_line, nullptr));
  if (cv->parsed()) return report(mvlf_run_cv(cfg.ptr, log_line, nullptr));
  if (synth->parsed()) {
    const std::string dir = ov.out.empty() ? "." : ov.out;
    return report(mvlf_run_synth(days, ov.seed.value_or(0), dir.c_str()));
  }
  if (perturb->parsed()) {
    ConfigHandle schema_cfg;
    if (const int rc = load_config(schema_cfg, false)) return rc;
    std::string schema;
    if (schema_cfg.ptr) {
      char* text = nullptr;
      if (const mvlf_status s = mvlf_config_to_json(schema_cfg.ptr, &text)) return report(s);
      schema = nlohmann::json::parse(text)["dataset"]["schema"].dump();
      mvlf_string_free(text);
    }
    return report(mvlf_run_perturb(input.c_str(), output.c_str(), schema.empty() ? nullptr : schema.c_str(),
                                   probability, ov.seed.value_or(0)));
  }
  if (is_params) {
    ConfigHandle pcfg;
    const std::string method = ov.method.empty() ? "all" : ov.method;
    if (!config_path.empty()) {
      Overrides no_method = ov;
      no_method.method.clear();
      if (const mvlf_status s = mvlf_config_load(config_path.c_str(), no_method.patch().c_str(), &pcfg.ptr)) {
        return report(s);
      }
    }
    char* table = nullptr;
    if (const mvlf_status s = mvlf_params_table(pcfg.ptr, method.c_str(), &table)) return report(s);
    std::fputs(table, stdout);
    mvlf_string_free(table);
    return kExitOk;
  }
  return kExitUsage;
}
