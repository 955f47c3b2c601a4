// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvlf/calendar.hpp"
#include "mvlf/error.hpp"
#include "mvlf/scaler.hpp"
#include "mvlf/synth.hpp"

namespace mvlf {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

RangeSpec parse_range(const json& j) {
  RangeSpec r;
  if (j.is_string()) {
    r.split = j.get<std::string>();
    if (r.split != "test" && r.split != "validation" && r.split != "train" && r.split != "all") {
      fail(ErrorCode::kConfig, "range must be test, validation, train, all or [start, end], got '" + r.split + "'");
    }
  } else if (j.is_array() && j.size() == 2) {
    r.split = "explicit";
    r.explicit_range = TimeRange{Timestamp::parse_iso(j[0].get<std::string>()), Timestamp::parse_iso(j[1].get<std::string>())};
    if (!(r.explicit_range->begin < r.explicit_range->end)) fail(ErrorCode::kConfig, "range start must precede its end");
  } else {
    fail(ErrorCode::kConfig, "range must be a split name or a [start, end] pair");
  }
  return r;
}

json range_json(const RangeSpec& r) {
  if (r.explicit_range) return json::array({r.explicit_range->begin.iso(), r.explicit_range->end.iso()});
  return r.split;
}

TimeRange resolve_range(const RangeSpec& r, const Splits& s, const TimeSeriesFrame& frame) {
  if (r.explicit_range) return *r.explicit_range;
  if (r.split == "validation") return s.validation;
  if (r.split == "train") return s.train;
  if (r.split == "all") return frame.span();
  return s.test;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory '" + dir + "': " + ec.message());
}

std::string out_file(const RunConfig& c, const std::string& name) { return (fs::path(c.output) / name).string(); }

void say(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

Checkpoint load_verified_checkpoint(const RunConfig& config, const TimeSeriesFrame& raw) {
  Checkpoint ck = load_checkpoint(checkpoint_path(config));
  const std::uint64_t expected = config_fingerprint(config.model, raw.specs(), config.train);
  if (ck.fingerprint != expected) {
    fail(ErrorCode::kFingerprint, "checkpoint '" + checkpoint_path(config) +
                                      "' was produced by a different configuration (fingerprint " +
                                      std::to_string(ck.fingerprint) + ", config " + std::to_string(expected) + ")");
  }
  return ck;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::kIo, "cannot write '" + path + "'");
    f << text;
    if (!f) fail(ErrorCode::kIo, "short write to '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(ErrorCode::kIo, "cannot move output into '" + path + "'");
}

RunConfig run_config_from_json(const std::string& text, const std::string& base_dir, const std::string& patch) {
  RunConfig c;
  try {
    json j = text.empty() ? json::object() : json::parse(text);
    if (!j.is_object()) fail(ErrorCode::kConfig, "run config must be a JSON object");
    if (!patch.empty()) j.merge_patch(json::parse(patch));

    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.output = resolve(base_dir, j.value("output", c.output));
    if (j.contains("dataset")) {
      const json& d = j["dataset"];
      c.dataset = resolve(base_dir, d.value("path", ""));
      if (d.contains("schema")) c.schema = schema_from_json(d["schema"].dump());
      const std::string region = d.value("region", "");
      c.region = region.empty() || region == "builtin" ? "" : resolve(base_dir, region);
      c.forward_fill = d.value("forward_fill", false);
    }
    c.model = model_config_from_json(j.contains("model") ? j["model"].dump() : "{}");
    json train = j.value("train", json::object());
    if (!train.contains("seed")) train["seed"] = c.seed;
    c.train = train_config_from_json(train.dump());
    if (j.contains("evaluate")) {
      const json& e = j["evaluate"];
      c.eval.horizons = e.value("horizons", c.eval.horizons);
      c.eval.stride = e.value("stride", c.eval.stride);
      c.eval.noise_probability = e.value("noise_probability", c.eval.noise_probability);
      c.eval.holidays = e.value("holidays", c.eval.holidays);
      c.eval.noisy = e.value("noisy", c.eval.noisy);
      if (e.contains("range")) c.eval_range = parse_range(e["range"]);
    }
    c.eval.noise_seed = j.contains("evaluate") ? j["evaluate"].value("noise_seed", c.seed) : c.seed;
    if (j.contains("forecast")) c.forecast_horizon = j["forecast"].value("horizon", c.forecast_horizon);
    if (j.contains("explain")) {
      const json& e = j["explain"];
      if (e.contains("groups")) c.groups = view_groups_from_json(e["groups"].dump());
      c.explain_horizon = e.value("horizon", c.explain_horizon);
      if (e.contains("range")) c.explain_range = parse_range(e["range"]);
    }
    if (j.contains("cv")) {
      const json& v = j["cv"];
      c.cv_train_months = v.value("train_months", c.cv_train_months);
      c.cv_test_months = v.value("test_months", c.cv_test_months);
      c.cv_step_months = v.value("step_months", c.cv_step_months);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed run config: ") + e.what());
  }
  if (c.eval.stride < 1 || c.forecast_horizon < 1 || c.explain_horizon < 1) {
    fail(ErrorCode::kConfig, "strides and horizons must be positive");
  }
  return c;
}

RunConfig load_run_config(const std::string& path, const std::string& patch) {
  if (!fs::exists(path)) fail(ErrorCode::kIo, "config file '" + path + "' not found");
  const std::string base = fs::absolute(fs::path(path)).parent_path().string();
  return run_config_from_json(read_file(path), base, patch);
}

std::string run_config_to_json(const RunConfig& c) {
  ojson j;
  ojson groups = ojson::array();
  for (const ViewGroup& g : c.groups) groups.push_back({{"name", g.name}, {"views", g.views}});
  j["dataset"] = {{"path", c.dataset},
                  {"schema", json::parse(schema_to_json(c.schema))},
                  {"region", c.region.empty() ? "builtin" : c.region},
                  {"forward_fill", c.forward_fill}};
  j["model"] = json::parse(model_config_to_json(c.model));
  j["train"] = json::parse(train_config_to_json(c.train));
  j["evaluate"] = {{"horizons", c.eval.horizons},     {"stride", c.eval.stride},
                   {"noise_probability", c.eval.noise_probability}, {"noise_seed", c.eval.noise_seed},
                   {"holidays", c.eval.holidays},     {"noisy", c.eval.noisy},
                   {"range", range_json(c.eval_range)}};
  j["forecast"] = {{"horizon", c.forecast_horizon}};
  ojson explain = {{"horizon", c.explain_horizon}, {"range", range_json(c.explain_range)}};
  if (!c.groups.empty()) explain["groups"] = groups;
  j["explain"] = explain;
  j["cv"] = {{"train_months", c.cv_train_months}, {"test_months", c.cv_test_months}, {"step_months", c.cv_step_months}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

TimeSeriesFrame load_dataset(const RunConfig& config) {
  if (config.dataset.empty()) fail(ErrorCode::kConfig, "run config names no dataset path");
  if (!fs::exists(config.dataset)) fail(ErrorCode::kIo, "dataset '" + config.dataset + "' not found");
  TimeSeriesFrame frame = load_csv(config.dataset, config.schema);
  if (config.forward_fill) frame = forward_fill(frame);
  if (has_calendar_views(frame)) return frame;
  const RegionCalendar region = config.region.empty() ? RegionCalendar::builtin() : RegionCalendar::load(config.region);
  return derive_calendar_views(frame, region);
}

std::string checkpoint_path(const RunConfig& config) { return out_file(config, "model.ckpt"); }

void run_ingest(const RunConfig& config, const LogFn& log) {
  const TimeSeriesFrame frame = load_dataset(config);
  ensure_dir(config.output);
  ojson summary;
  summary["rows"] = frame.rows();
  summary["start"] = frame.start().iso();
  summary["end"] = frame.span().end.iso();
  ojson features = ojson::array();
  for (std::size_t f = 0; f < frame.features(); ++f) {
    std::size_t missing = 0;
    for (std::size_t r = 0; r < frame.rows(); ++r) missing += frame.missing(r, f) ? 1 : 0;
    features.push_back({{"name", frame.spec(f).name}, {"missing", missing}});
  }
  summary["features"] = features;
  const LagSet lags = effective_lagset(frame.rows(), LagSet::defaults(), config.train.max_lag);
  summary["lags"] = lags.lags();
  summary["valid_anchors"] = valid_indices(frame, lags, config.model.horizon).size();
  write_csv(frame, out_file(config, "dataset.csv"));
  write_text_atomic(out_file(config, "summary.json"), summary.dump(2) + "\n");
  say(log, "ingested " + std::to_string(frame.rows()) + " rows x " + std::to_string(frame.features()) + " views");
}

void run_train(const RunConfig& config, bool resume, const LogFn& log) {
  const TimeSeriesFrame raw = load_dataset(config);
  ensure_dir(config.output);
  std::optional<Checkpoint> previous;
  if (resume) previous = load_verified_checkpoint(config, raw);
  write_text_atomic(out_file(config, "config.json"), run_config_to_json(config));
  TrainHooks hooks;
  hooks.resume = previous ? &*previous : nullptr;
  hooks.on_epoch = [&](const HistoryEntry& e) {
    say(log, "epoch " + std::to_string(e.epoch + 1) + "/" + std::to_string(config.train.epochs) + " lr " +
                 format_double(e.lr) + " train " + format_double(e.train_loss) +
                 (e.val_loss ? " val " + format_double(*e.val_loss) : std::string()));
  };
  const std::string ckpt = checkpoint_path(config);
  hooks.on_checkpoint = [&](const Checkpoint& c) { save_checkpoint(c, ckpt); };
  TrainResult result = train(raw, config.model, config.train, hooks);
  save_checkpoint(result.checkpoint, ckpt);
  write_text_atomic(out_file(config, "history.csv"), format_history_csv(result.checkpoint.history));
  write_text_atomic(out_file(config, "fingerprint.txt"), std::to_string(result.checkpoint.fingerprint) + "\n");
}

void run_evaluate(const RunConfig& config, const LogFn& log) {
  const TimeSeriesFrame raw = load_dataset(config);
  const Checkpoint ck = load_verified_checkpoint(config, raw);
  const TimeRange range = resolve_range(config.eval_range, ck.splits, raw);
  ModelPredictor model(ck.best());
  MetricsReport report = evaluate(model, raw, range, config.eval);
  report.params = param_count(config.model, raw.specs());
  report.fingerprint = ck.fingerprint;
  EvalConfig baseline_cfg = config.eval;
  MetricsReport baseline = evaluate(SeasonalNaive{}, raw, range, baseline_cfg);
  baseline.fingerprint = ck.fingerprint;

  std::string csv = report.to_csv();
  const std::string base_csv = baseline.to_csv();
  csv += base_csv.substr(base_csv.find('\n') + 1);
  const std::string json_text = "[\n" + report.to_json() + ",\n" + baseline.to_json() + "]\n";
  write_text_atomic(out_file(config, "report.csv"), csv);
  write_text_atomic(out_file(config, "report.json"), json_text);
  for (const MetricCell& c : report.cells) {
    say(log, report.method + " h=" + std::to_string(c.horizon) + " " + c.subset + " mape " +
                 (c.mape ? format_double(*c.mape) : std::string("absent")) + " over " + std::to_string(c.anchors) +
                 " anchors");
  }
}

void run_forecast(const RunConfig& config, std::optional<Timestamp> t0, const LogFn& log) {
  const TimeSeriesFrame raw = load_dataset(config);
  const Checkpoint ck = load_verified_checkpoint(config, raw);
  const ModelPredictor model(ck.best());
  const int horizon = config.forecast_horizon;
  if (horizon % model.chunk() != 0) {
    fail(ErrorCode::kConfig, "forecast horizon " + std::to_string(horizon) + " is not a multiple of " +
                                 std::to_string(model.chunk()));
  }
  const Timestamp anchor = t0 ? *t0 : ck.splits.test.begin;
  const TimeSeriesFrame prepared = model.prepare(raw);
  const std::vector<double> fc = model.rollout(prepared, anchor, horizon);
  std::string csv = "timestamp,forecast,truth\n";
  const std::size_t target = raw.target_index();
  for (int h = 1; h <= horizon; ++h) {
    const Timestamp t = anchor + h;
    const auto row = raw.row_of(t);
    const bool known = row && !raw.missing(*row, target);
    csv += t.iso() + "," + format_double(fc[static_cast<std::size_t>(h - 1)]) + "," +
           (known ? format_double(raw.value(*row, target)) : std::string()) + "\n";
  }
  ensure_dir(config.output);
  write_text_atomic(out_file(config, "forecast.csv"), csv);
  say(log, "forecast " + std::to_string(horizon) + "h from " + anchor.iso());
}

void run_explain(const RunConfig& config, const LogFn& log) {
  const TimeSeriesFrame raw = load_dataset(config);
  const Checkpoint ck = load_verified_checkpoint(config, raw);
  const TrainedModel model = ck.best();
  const std::vector<ViewGroup> groups = config.groups.empty() ? default_view_groups(raw.specs()) : config.groups;
  validate_view_groups(groups, raw.specs());
  const TimeRange range = resolve_range(config.explain_range, ck.splits, raw);
  const IsolationResult iso = isolate_views(model, raw, groups, range, config.explain_horizon);
  const EmbeddingDump dump = dump_embeddings(model.params, &model.scaler);
  const SvdReport svd = svd_embeddings(model.params);
  write_text_atomic(out_file(config, "panels.csv"), iso.to_csv());
  write_text_atomic(out_file(config, "panels.json"), iso.manifest_json(raw.spec(raw.target_index()).units));
  write_text_atomic(out_file(config, "embeddings.json"), dump.to_json());
  write_text_atomic(out_file(config, "embeddings.csv"), dump.to_csv());
  write_text_atomic(out_file(config, "svd.csv"), svd.to_csv());
  say(log, "explained " + std::to_string(groups.size()) + " view groups over " + std::to_string(iso.times.size()) +
               " hours");
}

void run_cv(const RunConfig& config, const LogFn& log) {
  const TimeSeriesFrame raw = load_dataset(config);
  ensure_dir(config.output);
  const CvResult result = rolling_cv(raw, config.model, config.train, config.eval, config.cv_train_months,
                                     config.cv_test_months, config.cv_step_months,
                                     [&](std::size_t k, std::size_t n) {
                                       say(log, "fold " + std::to_string(k + 1) + "/" + std::to_string(n));
                                     });
  write_text_atomic(out_file(config, "cv_folds.csv"), result.folds_csv());
  write_text_atomic(out_file(config, "cv_summary.csv"), result.summary_csv());
  for (const CvSummary& s : result.summary) {
    say(log, "h=" + std::to_string(s.horizon) + " " + s.subset + " mape " + format_double(s.mean) + " +- " +
                 format_double(s.stddev) + " over " + std::to_string(s.folds) + " folds");
  }
}

void run_synth(int days, std::uint64_t seed, const std::string& out_dir) {
  SynthOptions o;
  o.days = days;
  o.seed = seed;
  const TimeSeriesFrame frame = synth_generate(o);
  ensure_dir(out_dir);
  write_csv(frame, (fs::path(out_dir) / "data.csv").string());
}

void run_perturb(const std::string& input, const std::string& output, const std::vector<FeatureSpec>& schema,
                 double probability, std::uint64_t seed) {
  if (fs::exists(output) && fs::exists(input) && fs::equivalent(input, output)) {
    fail(ErrorCode::kArgument, "perturb would overwrite its input '" + input + "'");
  }
  if (!fs::exists(input)) fail(ErrorCode::kIo, "dataset '" + input + "' not found");
  const TimeSeriesFrame frame = load_csv(input, schema);
  const fs::path parent = fs::path(output).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  write_csv(inject_noise(frame, probability, seed), output);
}

std::string params_table(const std::vector<FeatureSpec>& schema, const std::string& methods,
                         const std::optional<ModelConfig>& base) {
  std::vector<Aggregation> list;
  if (methods == "all") list = {Aggregation::kSvd, Aggregation::kAdditive, Aggregation::kConcatenative};
  else list = {parse_aggregation(methods)};
  const TimeSeriesFrame probe(Timestamp::from_civil({2012, 1, 1}, 0), schema,
                              std::vector<double>(schema.size() * 2, 1.0), std::vector<std::uint8_t>(schema.size() * 2, 1));
  const std::vector<FeatureSpec> specs =
      has_calendar_views(probe) ? schema : derive_calendar_views(probe, RegionCalendar::builtin()).specs();
  std::string out = "method,d,views,width,embeddings,gates,encoder,decoder,head,total\n";
  for (Aggregation a : list) {
    ModelConfig c = ModelConfig::defaults(a);
    if (base) {
      const int d = c.d;
      c = *base;
      c.method = a;
      c.d = base->method == a ? base->d : d;
    }
    const ParamCount p = param_count(c, specs);
    out += std::string(to_string(a)) + "," + std::to_string(c.d) + "," + std::to_string(specs.size()) + "," +
           std::to_string(c.width(specs.size())) + "," + std::to_string(p.embeddings) + "," + std::to_string(p.gates) +
           "," + std::to_string(p.encoder) + "," + std::to_string(p.decoder) + "," + std::to_string(p.head) + "," +
           std::to_string(p.total()) + "\n";
  }
  return out;
}

}  // namespace mvlf
