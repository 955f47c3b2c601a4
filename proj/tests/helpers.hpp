// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Small fixtures shared by the unit tests.

#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "mvlf/frame.hpp"
#include "mvlf/rng.hpp"

namespace mvlf::testing {

/// One continuous target plus `extra` continuous exogenous columns and one
/// categorical column of cardinality 3; values drawn from `rng`.
inline TimeSeriesFrame random_frame(Rng& rng, std::size_t rows, std::size_t extra = 2, double missing_rate = 0.0) {
  std::vector<FeatureSpec> specs{{"load", FeatureKind::kContinuous, FeatureRole::kTarget, 0, "MW"}};
  for (std::size_t k = 0; k < extra; ++k) {
    specs.push_back({"x" + std::to_string(k), FeatureKind::kContinuous, FeatureRole::kExogenous, 0, ""});
  }
  specs.push_back({"cat", FeatureKind::kCategorical, FeatureRole::kCalendar, 3, ""});
  const std::size_t nf = specs.size();
  std::vector<double> v(rows * nf);
  std::vector<std::uint8_t> m(rows * nf, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    v[i * nf] = 100.0 + 10.0 * rng.uniform();
    for (std::size_t k = 0; k < extra; ++k) v[i * nf + 1 + k] = rng.normal();
    v[i * nf + nf - 1] = static_cast<double>(rng.below(3));
    for (std::size_t f = 0; f < nf; ++f) m[i * nf + f] = rng.uniform() < missing_rate ? 1 : 0;
  }
  return TimeSeriesFrame(Timestamp::from_civil({2015, 3, 1}, 0), specs, std::move(v), std::move(m));
}

inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mvlf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace mvlf::testing
