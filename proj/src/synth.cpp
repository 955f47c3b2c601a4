// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mvlf/error.hpp"
#include "mvlf/rng.hpp"

namespace mvlf {

TimeSeriesFrame inject_noise(const TimeSeriesFrame& frame, double probability, std::uint64_t seed,
                             std::vector<std::uint8_t>* replaced) {
  if (!(probability >= 0.0 && probability <= 1.0)) fail(ErrorCode::kArgument, "noise probability must lie in [0, 1]");
  const std::size_t nf = frame.features();
  std::vector<std::size_t> targets;
  std::vector<std::array<double, 3>> choices;
  for (std::size_t f = 0; f < nf; ++f) {
    const FeatureSpec& s = frame.spec(f);
    if (s.role != FeatureRole::kExogenous || s.categorical()) continue;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < frame.rows(); ++i) {
      if (frame.missing(i, f)) continue;
      const double v = frame.value(i, f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++n;
    }
    if (n == 0) continue;
    targets.push_back(f);
    choices.push_back({lo, hi, sum / static_cast<double>(n)});
  }

  std::vector<double> v = frame.values();
  if (replaced) replaced->assign(v.size(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const std::size_t f = targets[k];
      // Draw for every cell so the stream position does not depend on data.
      const bool hit = rng.uniform() < probability;
      const std::uint64_t pick = rng.below(3);
      if (!hit || frame.missing(i, f)) continue;
      v[i * nf + f] = choices[k][pick];
      if (replaced) (*replaced)[i * nf + f] = 1;
    }
  }
  return TimeSeriesFrame(frame.start(), frame.specs(), std::move(v), frame.missing_mask());
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Business-hours bump plus an evening peak; mean roughly zero.
double daily_profile(int hour) {
  const double h = static_cast<double>(hour);
  return 0.9 * std::exp(-0.5 * std::pow((h - 11.0) / 3.5, 2)) + 0.6 * std::exp(-0.5 * std::pow((h - 19.0) / 2.0, 2)) -
         0.45;
}

}  // namespace

double synth_load(Timestamp t, double temperature, bool holiday) {
  const int wd = t.weekday();
  const bool rest_day = wd >= 5 || holiday;
  double load = 1000.0;
  load += (rest_day ? 90.0 : 160.0) * daily_profile(t.hour_of_day());
  load += rest_day ? -110.0 : 0.0;
  load += 7.0 * std::max(0.0, 15.0 - temperature) + 11.0 * std::max(0.0, temperature - 21.0);
  return load;
}

TimeSeriesFrame synth_generate(const SynthOptions& options) {
  if (options.days < 14) fail(ErrorCode::kArgument, "synth_generate needs at least 14 days");
  if (options.noise < 0.0) fail(ErrorCode::kArgument, "synth noise must be non-negative");
  const RegionCalendar region = RegionCalendar::builtin();
  const std::vector<FeatureSpec> schema = default_schema();
  const std::size_t nf = schema.size();
  const std::size_t rows = static_cast<std::size_t>(options.days) * 24;
  const Timestamp start = Timestamp::from_civil(options.start, 0);

  Rng root(options.seed);
  Rng temp_rng = root.split("temperature");
  Rng dew_rng = root.split("dewpoint");
  Rng wind_rng = root.split("wind");
  Rng rain_rng = root.split("rain");
  Rng load_rng = root.split("load");

  std::vector<double> v(rows * nf);
  double temp_anomaly = 0.0, wind_anomaly = 0.0, rain_state = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const Timestamp t = start + static_cast<std::int64_t>(i);
    const CivilDate d = t.date();
    const double doy = static_cast<double>(days_from_civil(d) - days_from_civil({d.year, 1, 1}));
    const double hour = t.hour_of_day();

    temp_anomaly = 0.995 * temp_anomaly + 0.4 * temp_rng.normal();
    const double temperature = 7.0 - 14.0 * std::cos(kTwoPi * (doy - 20.0) / 365.25) +
                               4.0 * std::sin(kTwoPi * (hour - 9.0) / 24.0) + temp_anomaly;
    const double spread = 3.0 + 1.5 * (1.0 + std::sin(kTwoPi * doy / 365.25)) + 0.5 * std::abs(dew_rng.normal());
    const double dewpoint = temperature - spread;
    const double humidity = std::clamp(100.0 - 5.0 * spread, 10.0, 100.0);
    wind_anomaly = 0.98 * wind_anomaly + 0.8 * wind_rng.normal();
    const double wind = std::max(0.0, 12.0 + 4.0 * std::cos(kTwoPi * doy / 365.25) + 2.0 * std::sin(kTwoPi * hour / 24.0) +
                                          wind_anomaly);
    rain_state = 0.9 * rain_state + rain_rng.normal();
    const double rainfall = std::max(0.0, rain_state - 2.0);

    const int holiday = region.holiday_id(d);
    double load = synth_load(t, temperature, holiday != 0);
    const double eps = load_rng.normal();
    if (options.noise > 0.0) load *= 1.0 + options.noise * eps;

    double* row = &v[i * nf];
    row[0] = load;
    row[1] = temperature;
    row[2] = dewpoint;
    row[3] = wind;
    row[4] = humidity;
    row[5] = rainfall;
    row[6] = holiday;
    row[7] = region.in_school(d) ? 1 : 0;
  }
  return TimeSeriesFrame(start, schema, std::move(v), {});
}

}  // namespace mvlf
