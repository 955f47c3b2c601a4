// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mvlf/error.hpp"
#include "mvlf/synth.hpp"

using namespace mvlf;

namespace {

double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - m) * (x[i] - m);
    if (i >= lag) num += (x[i] - m) * (x[i - lag] - m);
  }
  return num / den;
}

}  // namespace

TEST_CASE("synthetic data is deterministic per seed") {
  SynthOptions o;
  o.days = 30;
  o.seed = 99;
  const auto a = synth_generate(o);
  const auto b = synth_generate(o);
  CHECK(a.values() == b.values());
  CHECK(format_csv(a) == format_csv(b));
  o.seed = 100;
  CHECK(synth_generate(o).values() != a.values());
}

TEST_CASE("noise-free load equals its closed form") {
  SynthOptions o;
  o.days = 21;
  o.noise = 0.0;
  const auto f = synth_generate(o);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    REQUIRE(f.value(i, 0) == synth_load(f.timestamp(i), f.value(i, 1), f.value(i, 6) != 0));
  }
}

TEST_CASE("synthetic load has strong weekly autocorrelation") {
  SynthOptions o;
  o.days = 365;
  o.seed = 5;
  const auto f = synth_generate(o);
  CHECK(f.specs() == default_schema());
  CHECK(autocorrelation(f.column(0), 168) > 0.8);
}

TEST_CASE("synth rejects short spans") {
  SynthOptions o;
  o.days = 13;
  CHECK_THROWS_AS(synth_generate(o), Error);
}

TEST_CASE("noise probability zero is the identity") {
  Rng rng(4);
  const auto f = testing::random_frame(rng, 200, 3);
  CHECK(inject_noise(f, 0.0, 1) == f);
}

TEST_CASE("noise probability one maps every exogenous cell to min, mean or max") {
  SynthOptions o;
  o.days = 20;
  const auto f = synth_generate(o);
  const auto g = inject_noise(f, 1.0, 3);
  for (std::size_t j = 1; j <= 5; ++j) {
    const auto c = f.column(j);
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (double v : c) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / static_cast<double>(c.size());
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const double v = g.value(i, j);
      REQUIRE((v == lo || v == hi || v == mean));
    }
  }
}

TEST_CASE("half the cells are replaced at probability one half") {
  SynthOptions o;
  o.days = 417;  // > 10,000 rows
  const auto f = synth_generate(o);
  std::vector<std::uint8_t> replaced;
  inject_noise(f, 0.5, 77, &replaced);
  std::size_t hit = 0, cells = 0;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 1; j <= 5; ++j) {
      ++cells;
      hit += replaced[i * f.features() + j];
    }
  const double frac = static_cast<double>(hit) / static_cast<double>(cells);
  CHECK(frac >= 0.48);
  CHECK(frac <= 0.52);
  const std::size_t rows_only = f.rows() >= 10000 ? 10000 : f.rows();
  std::size_t hit_col = 0;
  for (std::size_t i = 0; i < rows_only; ++i) hit_col += replaced[i * f.features() + 1];
  const double col_frac = static_cast<double>(hit_col) / static_cast<double>(rows_only);
  CHECK(col_frac >= 0.48);
  CHECK(col_frac <= 0.52);
}

TEST_CASE("noise never touches the target or calendar views") {
  Rng rng(6);
  for (double p : {0.3, 0.5, 1.0}) {
    SynthOptions o;
    o.days = 15;
    o.seed = rng.next_u64();
    const auto f = derive_calendar_views(synth_generate(o), RegionCalendar::builtin());
    const auto g = inject_noise(f, p, rng.next_u64());
    for (std::size_t j = 0; j < f.features(); ++j) {
      if (f.spec(j).role == FeatureRole::kExogenous) continue;
      CAPTURE(f.spec(j).name);
      CHECK(f.column(j) == g.column(j));
    }
  }
}

TEST_CASE("noise is deterministic and validates its probability") {
  Rng rng(8);
  const auto f = testing::random_frame(rng, 300, 2, 0.1);
  CHECK(inject_noise(f, 0.5, 11) == inject_noise(f, 0.5, 11));
  CHECK_FALSE(inject_noise(f, 0.5, 11) == inject_noise(f, 0.5, 12));
  CHECK(inject_noise(f, 0.5, 11).missing_mask() == f.missing_mask());
  CHECK_THROWS_AS(inject_noise(f, 1.5, 1), Error);
  CHECK_THROWS_AS(inject_noise(f, -0.1, 1), Error);
}
