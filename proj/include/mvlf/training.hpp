// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Losses, chronological splits, AdamW with cosine annealing, the training
// loop and checkpoints.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvlf/frame.hpp"
#include "mvlf/lagview.hpp"
#include "mvlf/model.hpp"
#include "mvlf/scaler.hpp"

namespace mvlf {

inline constexpr double kMapeEpsilon = 1e-6;

/// 100/N * sum |y - yhat| / |y|. Throws kData naming the first |y| <= 1e-6.
double mape(std::span<const double> y, std::span<const double> yhat);
double mse(std::span<const double> y, std::span<const double> yhat);

enum class LossKind { kMape, kMse };

struct SplitSpec {
  int test_months = 12;
  int validation_months = 12;
  int train_months = 48;  // upper bound; truncated to available history
};

struct Splits {
  TimeRange train;
  TimeRange validation;
  TimeRange test;
};

/// Calendar-month boundaries counted back from the end of the frame.
Splits split_chronological(const TimeSeriesFrame& frame, const SplitSpec& spec = {});

struct TrainConfig {
  int epochs = 300;
  int batch_size = 30;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  LossKind loss = LossKind::kMape;
  std::uint64_t seed = 0;
  SplitSpec split;
  int train_stride = 1;
  int val_stride = 24;
  std::optional<int> max_lag;
  /// When set, training anchors may read lag rows older than the train
  /// range (rolling windows shorter than the largest lag). Targets always
  /// stay inside the range.
  bool history_before_train = false;
};

std::string train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const std::string& text);

/// lr0 * (1 + cos(pi * epoch / epochs)) / 2.
double cosine_lr(int epoch, const TrainConfig& config);

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::int64_t step = 0;

  static AdamState zeros(std::span<const Parameter> params);
};

/// theta <- theta * (1 - lr * wd), then the bias-corrected Adam update.
void adamw_step(std::span<Parameter> params, AdamState& state, double lr, double weight_decay);

/// Everything needed to forecast from raw frames.
struct TrainedModel {
  ModelParams params;
  Scaler scaler;
  LagSet lagset = LagSet::defaults();
};

struct HistoryEntry {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
};

std::string format_history_csv(std::span<const HistoryEntry> history);

struct Checkpoint {
  std::uint64_t fingerprint = 0;
  ModelConfig model_config;
  TrainConfig train_config;
  Splits splits;
  TrainedModel current;
  std::vector<Matrix> best_values;
  std::optional<double> best_val;
  int best_epoch = -1;
  AdamState adam;
  int epochs_done = 0;
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_counter = 0;
  std::vector<HistoryEntry> history;

  /// The best-validation parameters (or the current ones when training ran
  /// without validation).
  TrainedModel best() const;
};

std::uint64_t config_fingerprint(const ModelConfig& model, std::span<const FeatureSpec> specs,
                                 const TrainConfig& train);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
/// Throws kIo for unreadable files, kParse for malformed ones.
Checkpoint load_checkpoint(const std::string& path);

struct TrainHooks {
  std::function<void(const HistoryEntry&)> on_epoch;
  std::function<void(const Checkpoint&)> on_checkpoint;  // after every epoch
  const Checkpoint* resume = nullptr;
  int stop_after_epochs = -1;  // stop early, leaving a resumable checkpoint
};

struct TrainResult {
  Checkpoint checkpoint;
  TrainedModel model;  // best-validation parameters
};

/// `frame` is raw (unscaled) with calendar views already derived. Splits
/// default to split_chronological(frame, config.split).
TrainResult train(const TimeSeriesFrame& frame, const ModelConfig& model_config, const TrainConfig& config,
                  const TrainHooks& hooks = {}, std::optional<Splits> splits = std::nullopt);

/// Anchors of `frame` usable for training on `range` with `config`.
std::vector<Timestamp> training_anchors(const TimeSeriesFrame& frame, const LagSet& lags, int horizon, TimeRange range,
                                        int stride, bool history_before_range);

struct Fold {
  TimeRange train;
  TimeRange test;
};

/// Rolling windows starting at frame start + largest lag: fold k trains on
/// months [k, k + train) and tests on [k + train, k + train + test).
std::vector<Fold> cv_folds(const TimeSeriesFrame& frame, const LagSet& lags, int train_months = 2,
                           int test_months = 1, int step_months = 1);

}  // namespace mvlf
