// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mvlf/frame.hpp"

namespace mvlf {

struct FeatureStats {
  double mean = 0.0;
  double stddev = 1.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
  bool scaled = false;  // false for categorical features
};

/// Per-feature standardization fitted on a time range.
class Scaler {
 public:
  Scaler() = default;
  Scaler(std::vector<FeatureStats> stats, TimeRange fitted) : stats_(std::move(stats)), fitted_(fitted) {}

  /// Needs at least two observed values per continuous feature inside
  /// `range`; zero variance raises kData naming the feature.
  static Scaler fit(const TimeSeriesFrame& frame, TimeRange range);

  TimeSeriesFrame apply(const TimeSeriesFrame& frame) const;
  TimeSeriesFrame invert(const TimeSeriesFrame& frame) const;

  double scale_value(std::size_t f, double x) const;
  double unscale_value(std::size_t f, double x) const;

  const std::vector<FeatureStats>& stats() const { return stats_; }
  const FeatureStats& stats(std::size_t f) const { return stats_.at(f); }
  TimeRange fitted_range() const { return fitted_; }

  std::string to_json() const;
  static Scaler from_json(const std::string& text);

 private:
  TimeSeriesFrame transform(const TimeSeriesFrame& frame, bool forward) const;

  std::vector<FeatureStats> stats_;
  TimeRange fitted_;
};

}  // namespace mvlf
