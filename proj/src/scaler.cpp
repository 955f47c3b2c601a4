// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/scaler.hpp"

#include <cmath>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

Scaler Scaler::fit(const TimeSeriesFrame& frame, TimeRange range) {
  const auto b = frame.row_of(range.begin);
  if (!b || range.end <= range.begin || range.end - frame.start() > static_cast<std::int64_t>(frame.rows())) {
    fail(ErrorCode::kArgument, "scaler range [" + range.begin.iso() + ", " + range.end.iso() + ") not inside the frame");
  }
  const std::size_t e = static_cast<std::size_t>(range.end - frame.start());
  std::vector<FeatureStats> stats(frame.features());
  for (std::size_t f = 0; f < frame.features(); ++f) {
    if (frame.spec(f).categorical()) continue;
    double sum = 0.0, lo = INFINITY, hi = -INFINITY;
    std::size_t n = 0;
    for (std::size_t i = *b; i < e; ++i) {
      if (frame.missing(i, f)) continue;
      const double v = frame.value(i, f);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++n;
    }
    if (n < 2) fail(ErrorCode::kData, "feature '" + frame.spec(f).name + "' has fewer than 2 observed values in the fit range");
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = *b; i < e; ++i)
      if (!frame.missing(i, f)) ss += (frame.value(i, f) - mu) * (frame.value(i, f) - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 0.0)) fail(ErrorCode::kData, "feature '" + frame.spec(f).name + "' is degenerate (zero variance)");
    stats[f] = FeatureStats{mu, sd, lo, hi, true};
  }
  return Scaler(std::move(stats), range);
}

double Scaler::scale_value(std::size_t f, double x) const {
  const FeatureStats& s = stats_.at(f);
  return s.scaled ? (x - s.mean) / s.stddev : x;
}

double Scaler::unscale_value(std::size_t f, double x) const {
  const FeatureStats& s = stats_.at(f);
  return s.scaled ? x * s.stddev + s.mean : x;
}

TimeSeriesFrame Scaler::transform(const TimeSeriesFrame& frame, bool forward) const {
  if (frame.features() != stats_.size()) fail(ErrorCode::kSchema, "scaler was fitted on a different feature set");
  std::vector<double> v = frame.values();
  const std::size_t nf = frame.features();
  for (std::size_t i = 0; i < frame.rows(); ++i)
    for (std::size_t f = 0; f < nf; ++f) {
      if (frame.missing(i, f)) continue;
      double& x = v[i * nf + f];
      x = forward ? scale_value(f, x) : unscale_value(f, x);
    }
  return TimeSeriesFrame(frame.start(), frame.specs(), std::move(v), frame.missing_mask());
}

TimeSeriesFrame Scaler::apply(const TimeSeriesFrame& frame) const { return transform(frame, true); }
TimeSeriesFrame Scaler::invert(const TimeSeriesFrame& frame) const { return transform(frame, false); }

std::string Scaler::to_json() const {
  nlohmann::json j;
  j["fitted"] = {fitted_.begin.hours(), fitted_.end.hours()};
  for (const FeatureStats& s : stats_) j["stats"].push_back({s.mean, s.stddev, s.min, s.max, s.scaled});
  return j.dump();
}

Scaler Scaler::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<FeatureStats> stats;
  for (const auto& s : j.at("stats")) {
    stats.push_back(FeatureStats{s[0].get<double>(), s[1].get<double>(), s[2].get<double>(), s[3].get<double>(),
                                 s[4].get<bool>()});
  }
  return Scaler(std::move(stats), TimeRange{Timestamp::from_hours(j["fitted"][0].get<std::int64_t>()),
                                            Timestamp::from_hours(j["fitted"][1].get<std::int64_t>())});
}

}  // namespace mvlf
