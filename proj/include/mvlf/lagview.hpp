// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// The scaled time-range input: instead of a dense context window the model
// sees the frame rows at a sparse set of hour offsets before the anchor
// (one year, one week, one day, half a day, and the last six hours).

#pragma once

#include <optional>
#include <vector>

#include "mvlf/frame.hpp"
#include "mvlf/matrix.hpp"

namespace mvlf {

/// Positive hour offsets ordered oldest first (strictly decreasing).
class LagSet {
 public:
  explicit LagSet(std::vector<int> lags);

  /// {8760, 168, 24, 12, 6, 5, 4, 3, 2, 1}; one year is exactly 365 days.
  static LagSet defaults();

  /// Drops every lag larger than `max_lag` hours.
  LagSet capped(int max_lag) const;

  const std::vector<int>& lags() const { return lags_; }
  std::size_t size() const { return lags_.size(); }
  int max() const { return lags_.front(); }
  int min() const { return lags_.back(); }
  bool operator==(const LagSet&) const = default;

 private:
  std::vector<int> lags_;
};

inline constexpr int kRemLagCap = 168;
inline constexpr int kOneMonthHours = 720;

/// Short-history mode: when the frame holds fewer than max lag + one month
/// of rows the lag set is capped at one week. An explicit cap always wins.
LagSet effective_lagset(std::size_t frame_rows, const LagSet& requested, std::optional<int> max_lag = std::nullopt);

struct ScaledInput {
  Matrix matrix;  // |lags| x F, row j = frame row at anchor - lags[j]
  Timestamp anchor;
  LagSet lagset = LagSet::defaults();
  std::vector<FeatureSpec> specs;
};

struct TrainingExample {
  ScaledInput input;
  std::vector<double> target;  // load at anchor + 1 .. anchor + horizon
};

/// Row indices t with t - max lag >= 0, every lag row complete and every
/// target row t+1..t+horizon complete. Never throws; may be empty.
std::vector<std::size_t> valid_indices(const TimeSeriesFrame& frame, const LagSet& lags, int horizon);

/// Same set as timestamps. An empty result raises kData stating the
/// minimum frame length.
std::vector<Timestamp> valid_timestamps(const TimeSeriesFrame& frame, const LagSet& lags, int horizon);

/// Raises kArgument naming the first lag whose row is absent or incomplete.
ScaledInput build_input(const TimeSeriesFrame& frame, Timestamp anchor, const LagSet& lags);

/// One example per anchor, order preserved. Any invalid anchor raises
/// kArgument listing it.
std::vector<TrainingExample> build_batch(const TimeSeriesFrame& frame, const std::vector<Timestamp>& anchors,
                                         const LagSet& lags, int horizon);

}  // namespace mvlf
