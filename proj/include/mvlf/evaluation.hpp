// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Recursive multi-chunk rollout, MAPE reports over full / holiday / noisy
// subsets, and a seasonal-naive reference.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mvlf/frame.hpp"
#include "mvlf/lagview.hpp"
#include "mvlf/model.hpp"
#include "mvlf/training.hpp"

namespace mvlf {

/// Maps one lag matrix to tau values in model input units.
using ChunkFn = std::function<std::vector<double>(const ScaledInput&)>;

struct RolloutTrace {
  std::vector<ScaledInput> inputs;  // one per model call
  std::vector<std::vector<double>> chunks;
};

/// Forecasts `horizon` hours after anchor t0 in ceil(horizon / tau) calls.
/// Load cells after t0 are read from a working copy that holds the
/// forecasts emitted so far; every other cell comes from `frame`. Raises
/// kData naming the first uncovered hour when a needed exogenous or
/// calendar cell is missing.
std::vector<double> forecast_rollout(const TimeSeriesFrame& frame, Timestamp t0, int horizon, const LagSet& lags,
                                     int tau, const ChunkFn& chunk, RolloutTrace* trace = nullptr);

/// Whether forecast_rollout would find every cell it reads.
bool rollout_covered(const TimeSeriesFrame& frame, Timestamp t0, int horizon, const LagSet& lags, int tau);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  /// Converts a raw frame into whatever rollout() reads.
  virtual TimeSeriesFrame prepare(const TimeSeriesFrame& raw) const = 0;
  /// `horizon` forecasts in raw load units for t0 + 1 .. t0 + horizon.
  virtual std::vector<double> rollout(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const = 0;
  /// True when every cell rollout() would read is observed.
  virtual bool covered(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const = 0;
  /// Hours emitted per internal step; evaluated horizons must be multiples.
  virtual int chunk() const { return 1; }
};

class ModelPredictor : public Predictor {
 public:
  explicit ModelPredictor(TrainedModel model, DropoutDirective directive = DropoutDirective::eval());
  std::string name() const override { return to_string(model_.params.config().method); }
  TimeSeriesFrame prepare(const TimeSeriesFrame& raw) const override;
  std::vector<double> rollout(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const override;
  bool covered(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const override;
  int chunk() const override { return model_.params.config().horizon; }
  const TrainedModel& model() const { return model_; }

 private:
  TrainedModel model_;
  DropoutDirective directive_;
};

/// forecast(t0 + h) = load(t0 + h - 168); beyond one week the forecast
/// repeats itself.
class SeasonalNaive : public Predictor {
 public:
  std::string name() const override { return "seasonal_naive"; }
  TimeSeriesFrame prepare(const TimeSeriesFrame& raw) const override { return raw; }
  std::vector<double> rollout(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const override;
  bool covered(const TimeSeriesFrame& prepared, Timestamp t0, int horizon) const override;
};

std::vector<double> seasonal_naive(const TimeSeriesFrame& frame, Timestamp t0, int horizon);

struct EvalConfig {
  std::vector<int> horizons{24, 48, 168};
  int stride = 24;
  double noise_probability = 0.5;
  std::uint64_t noise_seed = 0;
  bool holidays = true;
  bool noisy = true;
};

struct MetricCell {
  int horizon = 0;
  std::string subset;           // full | holidays | noisy
  std::optional<double> mape;   // absent when the subset is empty
  std::size_t anchors = 0;
};

struct MetricsReport {
  std::string method;
  std::optional<ParamCount> params;
  std::uint64_t fingerprint = 0;
  std::vector<MetricCell> cells;

  const MetricCell* find(int horizon, const std::string& subset) const;
  std::string to_csv() const;
  std::string to_json() const;
};

/// Anchors t in `range` (every `stride` hours from range.begin) whose
/// forecast window t + 1 .. t + horizon lies inside `range`, whose targets
/// are observed and which the predictor covers.
std::vector<Timestamp> evaluation_anchors(const Predictor& predictor, const TimeSeriesFrame& raw,
                                          const TimeSeriesFrame& prepared, TimeRange range, int horizon, int stride);

/// Column holding holiday ids: "holiday", else "holiday_id".
std::optional<std::size_t> holiday_column(const TimeSeriesFrame& frame);

/// Anchors whose forecast window touches an hour with a nonzero holiday id.
std::vector<Timestamp> holiday_anchors(const TimeSeriesFrame& raw, std::span<const Timestamp> anchors, int horizon);

/// `raw` is the unscaled frame with calendar views derived.
MetricsReport evaluate(const Predictor& predictor, const TimeSeriesFrame& raw, TimeRange range,
                       const EvalConfig& config);

struct FoldReport {
  Fold fold;
  MetricsReport report;
};

struct CvSummary {
  int horizon = 0;
  std::string subset;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t folds = 0;
};

struct CvResult {
  std::vector<FoldReport> folds;
  std::vector<CvSummary> summary;

  std::string folds_csv() const;
  std::string summary_csv() const;
};

/// Trains a fresh model per fold and evaluates it on the following window.
CvResult rolling_cv(const TimeSeriesFrame& raw, const ModelConfig& model, const TrainConfig& train,
                    const EvalConfig& eval, int train_months = 2, int test_months = 1, int step_months = 1,
                    const std::function<void(std::size_t, std::size_t)>& on_fold = {});

}  // namespace mvlf
