// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvlf/timestamp.hpp"

namespace mvlf {

enum class FeatureKind { kContinuous, kCategorical };
enum class FeatureRole { kTarget, kExogenous, kCalendar };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  FeatureRole role = FeatureRole::kExogenous;
  int cardinality = 0;  // categorical only
  std::string units;

  bool categorical() const { return kind == FeatureKind::kCategorical; }
  bool operator==(const FeatureSpec&) const = default;
};

/// Hourly multi-feature series on a gap-free grid. Row i is the instant
/// start + i hours; absent observations are missing-masked cells, never
/// absent rows. Immutable once built: every transformation returns a new
/// frame.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;

  /// Validates every invariant. `values` and `missing` are row-major T x F.
  /// Missing cells are stored as NaN regardless of what was passed.
  TimeSeriesFrame(Timestamp start, std::vector<FeatureSpec> specs, std::vector<double> values,
                  std::vector<std::uint8_t> missing);

  std::size_t rows() const { return rows_; }
  std::size_t features() const { return specs_.size(); }
  Timestamp start() const { return start_; }
  Timestamp timestamp(std::size_t row) const { return start_ + static_cast<std::int64_t>(row); }
  TimeRange span() const { return {start_, start_ + static_cast<std::int64_t>(rows_)}; }
  std::optional<std::size_t> row_of(Timestamp t) const;

  const std::vector<FeatureSpec>& specs() const { return specs_; }
  const FeatureSpec& spec(std::size_t f) const { return specs_.at(f); }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws kSchema
  std::size_t target_index() const { return target_; }

  double value(std::size_t row, std::size_t f) const { return values_[row * specs_.size() + f]; }
  bool missing(std::size_t row, std::size_t f) const { return missing_[row * specs_.size() + f] != 0; }
  bool row_complete(std::size_t row) const;
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * specs_.size(), specs_.size()}; }
  std::vector<double> column(std::size_t f) const;

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint8_t>& missing_mask() const { return missing_; }

  TimeSeriesFrame slice(TimeRange range) const;
  /// Same grid and specs, one column replaced.
  TimeSeriesFrame with_column(std::size_t f, std::span<const double> column) const;
  /// Appends k new features; `values` is T x k row-major, never missing.
  TimeSeriesFrame with_features(std::span<const FeatureSpec> extra, std::span<const double> values) const;

  bool operator==(const TimeSeriesFrame& o) const;

 private:
  Timestamp start_;
  std::size_t rows_ = 0;
  std::vector<FeatureSpec> specs_;
  std::vector<double> values_;
  std::vector<std::uint8_t> missing_;
  std::size_t target_ = 0;
};

/// The hourly dataset schema: load, temperature, dewpoint, wind_speed,
/// humidity, rainfall, holiday_id, school.
std::vector<FeatureSpec> default_schema();
std::vector<FeatureSpec> schema_from_json(const std::string& json_text);
std::string schema_to_json(std::span<const FeatureSpec> specs);

/// Reads `timestamp,<schema names...>`. Rows are sorted and re-indexed onto
/// a continuous hourly grid; absent hours become fully missing rows.
TimeSeriesFrame load_csv(const std::string& path, const std::vector<FeatureSpec>& schema);
TimeSeriesFrame parse_csv(const std::string& text, const std::vector<FeatureSpec>& schema);
void write_csv(const TimeSeriesFrame& frame, const std::string& path);
std::string format_csv(const TimeSeriesFrame& frame);

/// Optional imputation (off by default): missing cells take the last
/// observed value of their column; leading gaps stay missing.
TimeSeriesFrame forward_fill(const TimeSeriesFrame& frame);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace mvlf
