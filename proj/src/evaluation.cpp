// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "mvlf/error.hpp"
#include "mvlf/synth.hpp"

namespace mvlf {

namespace {

const char* const kSubsets[] = {"full", "holidays", "noisy"};

std::size_t anchor_row(const TimeSeriesFrame& frame, Timestamp t0) {
  const auto r0 = frame.row_of(t0);
  if (!r0) fail(ErrorCode::kArgument, "anchor " + t0.iso() + " is outside the frame");
  return *r0;
}

// Returns an empty string when covered, otherwise a description of the
// first cell the rollout cannot read.
std::string first_gap(const TimeSeriesFrame& frame, std::size_t r0, int horizon, const LagSet& lags, int tau) {
  const std::size_t target = frame.target_index();
  const int calls = (horizon + tau - 1) / tau;
  for (int k = 0; k < calls; ++k) {
    const std::int64_t anchor = static_cast<std::int64_t>(r0) + static_cast<std::int64_t>(k) * tau;
    for (int lag : lags.lags()) {
      const std::int64_t r = anchor - lag;
      if (r < 0) return "lag " + std::to_string(lag) + "h of " + frame.timestamp(r0).iso() + " precedes the frame";
      const std::size_t row = static_cast<std::size_t>(r);
      if (row >= frame.rows()) return "hour " + (frame.start() + r).iso() + " is beyond the frame";
      for (std::size_t f = 0; f < frame.features(); ++f) {
        if (f == target && row > r0) continue;
        if (frame.missing(row, f)) return "hour " + frame.timestamp(row).iso() + " has no " + frame.spec(f).name;
      }
    }
  }
  return {};
}

}  // namespace

bool rollout_covered(const TimeSeriesFrame& frame, Timestamp t0, int horizon, const LagSet& lags, int tau) {
  const auto r0 = frame.row_of(t0);
  return r0 && horizon >= 1 && tau >= 1 && first_gap(frame, *r0, horizon, lags, tau).empty();
}

std::vector<double> forecast_rollout(const TimeSeriesFrame& frame, Timestamp t0, int horizon, const LagSet& lags,
                                     int tau, const ChunkFn& chunk, RolloutTrace* trace) {
  if (horizon < 1 || tau < 1) fail(ErrorCode::kArgument, "rollout horizon and chunk length must be positive");
  const std::size_t r0 = anchor_row(frame, t0);
  const std::string gap = first_gap(frame, r0, horizon, lags, tau);
  if (!gap.empty()) fail(ErrorCode::kData, "rollout from " + t0.iso() + " not covered: " + gap);

  const std::size_t target = frame.target_index();
  const std::size_t nf = frame.features();
  const int calls = (horizon + tau - 1) / tau;
  std::vector<double> working;
  working.reserve(static_cast<std::size_t>(calls * tau));
  for (int k = 0; k < calls; ++k) {
    const std::size_t anchor = r0 + static_cast<std::size_t>(k * tau);
    ScaledInput in{Matrix(lags.size(), nf), frame.timestamp(anchor), lags, frame.specs()};
    for (std::size_t j = 0; j < lags.size(); ++j) {
      const std::size_t row = anchor - static_cast<std::size_t>(lags.lags()[j]);
      const auto src = frame.row(row);
      std::copy(src.begin(), src.end(), in.matrix.data.begin() + j * nf);
      if (row > r0) in.matrix(j, target) = working[row - r0 - 1];
    }
    std::vector<double> out = chunk(in);
    if (out.size() != static_cast<std::size_t>(tau)) {
      fail(ErrorCode::kDimension, "chunk returned " + std::to_string(out.size()) + " values, expected " +
                                      std::to_string(tau));
    }
    working.insert(working.end(), out.begin(), out.end());
    if (trace) {
      trace->inputs.push_back(std::move(in));
      trace->chunks.push_back(std::move(out));
    }
  }
  working.resize(static_cast<std::size_t>(horizon));
  return working;
}

ModelPredictor::ModelPredictor(TrainedModel model, DropoutDirective directive)
    : model_(std::move(model)), directive_(std::move(directive)) {
  if (directive_.training()) fail(ErrorCode::kArgument, "prediction takes an eval or forced directive");
}

TimeSeriesFrame ModelPredictor::prepare(const TimeSeriesFrame& raw) const {
  if (raw.specs() != model_.params.specs()) {
    fail(ErrorCode::kSchema, "frame schema does not match the model's views");
  }
  return model_.scaler.apply(raw);
}

std::vector<double> ModelPredictor::rollout(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const {
  const ModelParams& params = model_.params;
  std::vector<double> out = forecast_rollout(
      prepared, t0, horizon, model_.lagset, params.config().horizon,
      [&](const ScaledInput& in) { return predict(in, params, directive_); });
  const std::size_t target = prepared.target_index();
  for (double& v : out) v = model_.scaler.unscale_value(target, v);
  return out;
}

bool ModelPredictor::covered(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const {
  return rollout_covered(prepared, t0, horizon, model_.lagset, model_.params.config().horizon);
}

std::vector<double> seasonal_naive(const TimeSeriesFrame& frame, Timestamp t0, int horizon) {
  if (horizon < 1) fail(ErrorCode::kArgument, "horizon must be positive");
  const std::size_t r0 = anchor_row(frame, t0);
  if (r0 + 1 < 168) {
    fail(ErrorCode::kData, "seasonal naive at " + t0.iso() + " needs 168 hours of history, frame has " +
                               std::to_string(r0 + 1));
  }
  const std::size_t target = frame.target_index();
  std::vector<double> out(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h) {
    if (h <= 168) {
      const std::size_t row = r0 + static_cast<std::size_t>(h) - 168;
      if (frame.missing(row, target)) fail(ErrorCode::kData, "no load at " + frame.timestamp(row).iso());
      out[static_cast<std::size_t>(h - 1)] = frame.value(row, target);
    } else {
      out[static_cast<std::size_t>(h - 1)] = out[static_cast<std::size_t>(h - 169)];
    }
  }
  return out;
}

std::vector<double> SeasonalNaive::rollout(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const {
  return seasonal_naive(prepared, t0, horizon);
}

bool SeasonalNaive::covered(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const {
  const auto r0 = prepared.row_of(t0);
  if (!r0 || *r0 + 1 < 168) return false;
  const std::size_t target = prepared.target_index();
  for (int h = 1; h <= std::min(horizon, 168); ++h) {
    if (prepared.missing(*r0 + static_cast<std::size_t>(h) - 168, target)) return false;
  }
  return true;
}

std::vector<Timestamp> evaluation_anchors(const Predictor& predictor, const TimeSeriesFrame& raw,
                                          const TimeSeriesFrame& prepared, TimeRange range, int horizon, int stride) {
  if (horizon < 1 || stride < 1) fail(ErrorCode::kArgument, "horizon and stride must be positive");
  std::vector<Timestamp> out;
  const std::size_t target = raw.target_index();
  for (Timestamp t = range.begin; t + horizon < range.end; t = t + stride) {
    const auto r = raw.row_of(t);
    if (!r || *r + static_cast<std::size_t>(horizon) >= raw.rows()) continue;
    bool ok = true;
    for (int h = 1; h <= horizon && ok; ++h) ok = !raw.missing(*r + static_cast<std::size_t>(h), target);
    if (ok && predictor.covered(prepared, t, horizon)) out.push_back(t);
  }
  return out;
}

std::optional<std::size_t> holiday_column(const TimeSeriesFrame& frame) {
  if (auto f = frame.find("holiday")) return f;
  return frame.find("holiday_id");
}

std::vector<Timestamp> holiday_anchors(const TimeSeriesFrame& raw, std::span<const Timestamp> anchors, int horizon) {
  std::vector<Timestamp> out;
  const auto col = holiday_column(raw);
  if (!col) return out;
  for (const Timestamp& t : anchors) {
    const auto r = raw.row_of(t);
    if (!r) continue;
    for (int h = 1; h <= horizon; ++h) {
      const std::size_t row = *r + static_cast<std::size_t>(h);
      if (row < raw.rows() && !raw.missing(row, *col) && raw.value(row, *col) != 0.0) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

namespace {

std::vector<double> truth_at(const TimeSeriesFrame& raw, Timestamp t, int horizon) {
  const std::size_t r = *raw.row_of(t);
  std::vector<double> y(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h) y[static_cast<std::size_t>(h - 1)] = raw.value(r + static_cast<std::size_t>(h), raw.target_index());
  return y;
}

MetricCell pooled(int horizon, const char* subset, const std::vector<std::vector<double>>& truth,
                  const std::vector<std::vector<double>>& pred) {
  MetricCell cell{horizon, subset, std::nullopt, truth.size()};
  if (truth.empty()) return cell;
  std::vector<double> y, yhat;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    y.insert(y.end(), truth[i].begin(), truth[i].end());
    yhat.insert(yhat.end(), pred[i].begin(), pred[i].end());
  }
  cell.mape = mape(y, yhat);
  return cell;
}

}  // namespace

MetricsReport evaluate(const Predictor& predictor, const TimeSeriesFrame& raw, TimeRange range,
                       const EvalConfig& config) {
  if (config.horizons.empty()) fail(ErrorCode::kConfig, "no evaluation horizons");
  for (int h : config.horizons) {
    if (h < 1 || h % predictor.chunk() != 0) {
      fail(ErrorCode::kConfig, "horizon " + std::to_string(h) + " is not a positive multiple of the model's " +
                                   std::to_string(predictor.chunk()) + "h chunk");
    }
  }
  if (range.begin < raw.start() || range.end > raw.span().end || !(range.begin < range.end)) {
    fail(ErrorCode::kArgument, "evaluation range " + range.begin.iso() + " .. " + range.end.iso() +
                                   " is not inside the frame");
  }
  MetricsReport report;
  report.method = predictor.name();
  const TimeSeriesFrame prepared = predictor.prepare(raw);
  std::optional<TimeSeriesFrame> noisy_prepared;
  if (config.noisy) noisy_prepared = predictor.prepare(inject_noise(raw, config.noise_probability, config.noise_seed));

  for (int h : config.horizons) {
    const auto anchors = evaluation_anchors(predictor, raw, prepared, range, h, config.stride);
    std::vector<std::vector<double>> truth, pred;
    for (const Timestamp& t : anchors) {
      truth.push_back(truth_at(raw, t, h));
      pred.push_back(predictor.rollout(prepared, t, h));
    }
    report.cells.push_back(pooled(h, kSubsets[0], truth, pred));
    if (config.holidays) {
      const auto hol = holiday_anchors(raw, anchors, h);
      std::vector<std::vector<double>> ht, hp;
      for (std::size_t i = 0, j = 0; i < anchors.size() && j < hol.size(); ++i) {
        if (anchors[i] == hol[j]) {
          ht.push_back(truth[i]);
          hp.push_back(pred[i]);
          ++j;
        }
      }
      report.cells.push_back(pooled(h, kSubsets[1], ht, hp));
    }
    if (noisy_prepared) {
      std::vector<std::vector<double>> np;
      for (const Timestamp& t : anchors) np.push_back(predictor.rollout(*noisy_prepared, t, h));
      report.cells.push_back(pooled(h, kSubsets[2], truth, np));
    }
  }
  return report;
}

const MetricCell* MetricsReport::find(int horizon, const std::string& subset) const {
  for (const MetricCell& c : cells)
    if (c.horizon == horizon && c.subset == subset) return &c;
  return nullptr;
}

std::string MetricsReport::to_csv() const {
  std::string out = "method,horizon,subset,mape,anchors\n";
  for (const MetricCell& c : cells) {
    out += method + "," + std::to_string(c.horizon) + "," + c.subset + "," + (c.mape ? format_double(*c.mape) : "") +
           "," + std::to_string(c.anchors) + "\n";
  }
  return out;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["fingerprint"] = std::to_string(fingerprint);
  if (params) {
    j["params"] = {{"embeddings", params->embeddings}, {"gates", params->gates}, {"encoder", params->encoder},
                   {"decoder", params->decoder},       {"head", params->head},   {"total", params->total()}};
  }
  nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
  for (const MetricCell& c : cells) {
    nlohmann::ordered_json cj;
    cj["horizon"] = c.horizon;
    cj["subset"] = c.subset;
    cj["mape"] = c.mape ? nlohmann::ordered_json(*c.mape) : nlohmann::ordered_json(nullptr);
    cj["anchors"] = c.anchors;
    cells_json.push_back(cj);
  }
  j["cells"] = cells_json;
  return j.dump(2) + "\n";
}

std::string CvResult::folds_csv() const {
  std::string out = "fold,train_start,train_end,test_start,test_end,horizon,subset,mape,anchors\n";
  for (std::size_t k = 0; k < folds.size(); ++k) {
    const Fold& f = folds[k].fold;
    for (const MetricCell& c : folds[k].report.cells) {
      out += std::to_string(k) + "," + f.train.begin.iso() + "," + f.train.end.iso() + "," + f.test.begin.iso() + "," +
             f.test.end.iso() + "," + std::to_string(c.horizon) + "," + c.subset + "," +
             (c.mape ? format_double(*c.mape) : "") + "," + std::to_string(c.anchors) + "\n";
    }
  }
  return out;
}

std::string CvResult::summary_csv() const {
  std::string out = "horizon,subset,mean_mape,std_mape,folds\n";
  for (const CvSummary& s : summary) {
    out += std::to_string(s.horizon) + "," + s.subset + "," + format_double(s.mean) + "," + format_double(s.stddev) +
           "," + std::to_string(s.folds) + "\n";
  }
  return out;
}

CvResult rolling_cv(const TimeSeriesFrame& raw, const ModelConfig& model, const TrainConfig& train_config,
                    const EvalConfig& eval, int train_months, int test_months, int step_months,
                    const std::function<void(std::size_t, std::size_t)>& on_fold) {
  const LagSet lags = effective_lagset(raw.rows(), LagSet::defaults(), train_config.max_lag);
  const std::vector<Fold> folds = cv_folds(raw, lags, train_months, test_months, step_months);
  TrainConfig tc = train_config;
  tc.history_before_train = true;
  CvResult result;
  for (std::size_t k = 0; k < folds.size(); ++k) {
    if (on_fold) on_fold(k, folds.size());
    const Fold& f = folds[k];
    const Splits splits{f.train, {f.train.end, f.train.end}, f.test};
    TrainResult trained = train(raw, model, tc, {}, splits);
    ModelPredictor predictor(std::move(trained.model));
    MetricsReport report = evaluate(predictor, raw, f.test, eval);
    report.params = param_count(model, raw.specs());
    report.fingerprint = trained.checkpoint.fingerprint;
    result.folds.push_back({f, std::move(report)});
  }
  std::map<std::pair<int, std::string>, std::vector<double>> cells;
  std::vector<std::pair<int, std::string>> order;
  for (const FoldReport& fr : result.folds) {
    for (const MetricCell& c : fr.report.cells) {
      const auto key = std::make_pair(c.horizon, c.subset);
      if (!cells.count(key)) order.push_back(key);
      if (c.mape) cells[key].push_back(*c.mape);
      else cells[key];
    }
  }
  for (const auto& key : order) {
    const auto& v = cells[key];
    if (v.empty()) continue;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    result.summary.push_back({key.first, key.second, mean, sd, v.size()});
  }
  return result;
}

}  // namespace mvlf
