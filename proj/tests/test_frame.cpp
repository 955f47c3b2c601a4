// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "helpers.hpp"
#include "mvlf/error.hpp"
#include "mvlf/frame.hpp"

using namespace mvlf;

namespace {

std::vector<FeatureSpec> load_only() { return {{"load", FeatureKind::kContinuous, FeatureRole::kTarget, 0, "MW"}}; }

std::vector<FeatureSpec> load_and_flag() {
  return {{"load", FeatureKind::kContinuous, FeatureRole::kTarget, 0, "MW"},
          {"flag", FeatureKind::kCategorical, FeatureRole::kCalendar, 2, ""}};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("three consecutive hours load without gaps") {
  const auto f = parse_csv(
      "timestamp,load\n2013-01-01T00:00:00Z,10\n2013-01-01T01:00:00Z,11\n2013-01-01T02:00:00Z,12\n", load_only());
  REQUIRE(f.rows() == 3);
  CHECK(f.column(0) == std::vector<double>{10, 11, 12});
  for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(f.missing(i, 0));
  CHECK(f.start().iso() == "2013-01-01T00:00:00Z");
}

TEST_CASE("absent hours become fully missing rows") {
  const auto f = parse_csv("timestamp,load,flag\n2013-01-01T02:00:00Z,12,1\n2013-01-01T00:00:00Z,10,0\n",
                           load_and_flag());
  REQUIRE(f.rows() == 3);
  CHECK(f.value(0, 0) == 10);
  CHECK(f.value(2, 0) == 12);
  CHECK(f.missing(1, 0));
  CHECK(f.missing(1, 1));
  CHECK(std::isnan(f.value(1, 0)));
  CHECK_FALSE(f.row_complete(1));
  CHECK(f.row_complete(2));
}

TEST_CASE("empty cells are missing") {
  const auto f = parse_csv("timestamp,load,flag\n2013-01-01T00:00:00Z,,1\n", load_and_flag());
  CHECK(f.missing(0, 0));
  CHECK_FALSE(f.missing(0, 1));
}

TEST_CASE("offsets are normalized to UTC") {
  const auto f = parse_csv("timestamp,load\n2013-01-01T00:00:00-05:00,10\n", load_only());
  CHECK(f.start().iso() == "2013-01-01T05:00:00Z");
}

TEST_CASE("ingest errors carry the right codes") {
  CHECK(code_of([] { parse_csv("time,load\n", load_only()); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_csv("timestamp,demand\n", load_only()); }) == ErrorCode::kSchema);
  CHECK(code_of([] { parse_csv("timestamp,load\n2013-01-01T00:30:00Z,1\n", load_only()); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_csv("timestamp,load\n2013-01-01T00:00:00Z,abc\n", load_only()); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_csv("timestamp,load\n2013-01-01T00:00:00Z,1,2\n", load_only()); }) == ErrorCode::kParse);
  CHECK(code_of([] {
          parse_csv("timestamp,load\n2013-01-01T00:00:00Z,1\n2013-01-01T00:00:00Z,2\n", load_only());
        }) == ErrorCode::kData);
  CHECK(code_of([] { parse_csv("timestamp,load,flag\n2013-01-01T00:00:00Z,1,2\n", load_and_flag()); }) ==
        ErrorCode::kSchema);
  CHECK(code_of([] { parse_csv("timestamp,load,flag\n2013-01-01T00:00:00Z,1,0.5\n", load_and_flag()); }) ==
        ErrorCode::kSchema);
  CHECK(code_of([] { parse_csv("timestamp,load\n", load_only()); }) == ErrorCode::kData);
  CHECK(code_of([] { load_csv("/nonexistent/data.csv", load_only()); }) == ErrorCode::kIo);
}

TEST_CASE("malformed timestamp error names the row") {
  try {
    parse_csv("timestamp,load\n2013-01-01T00:00:00Z,1\n2013-01-01X01:00:00Z,2\n", load_only());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("frame construction enforces the schema") {
  const Timestamp t0 = Timestamp::from_hours(0);
  std::vector<FeatureSpec> two_targets = load_only();
  two_targets.push_back({"other", FeatureKind::kContinuous, FeatureRole::kTarget, 0, ""});
  CHECK(code_of([&] { TimeSeriesFrame(t0, two_targets, {1, 2}, {}); }) == ErrorCode::kSchema);
  std::vector<FeatureSpec> cat_target{{"load", FeatureKind::kCategorical, FeatureRole::kTarget, 3, ""}};
  CHECK(code_of([&] { TimeSeriesFrame(t0, cat_target, {1}, {}); }) == ErrorCode::kSchema);
  CHECK(code_of([&] { TimeSeriesFrame(t0, load_only(), {INFINITY}, {}); }) == ErrorCode::kData);
  CHECK(code_of([&] { TimeSeriesFrame(t0, load_and_flag(), {1, 2, 3}, {}); }) == ErrorCode::kDimension);
}

TEST_CASE("csv write then load is the identity on random frames") {
  Rng rng(17);
  const auto dir = testing::temp_dir("frame_roundtrip");
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = testing::random_frame(rng, 200, 3, 0.1);
    const std::string path = dir + "/f.csv";
    write_csv(f, path);
    const auto g = load_csv(path, f.specs());
    CAPTURE(trial);
    REQUIRE(g.rows() <= f.rows());
    CHECK(g.start() >= f.start());
    const std::size_t off = static_cast<std::size_t>(g.start() - f.start());
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < f.features(); ++j) {
        REQUIRE(g.missing(i, j) == f.missing(i + off, j));
        if (!g.missing(i, j)) REQUIRE(g.value(i, j) == f.value(i + off, j));
      }
    }
  }
  Rng clean(4);
  const auto f = testing::random_frame(clean, 100, 2, 0.0);
  write_csv(f, dir + "/g.csv");
  CHECK(load_csv(dir + "/g.csv", f.specs()) == f);
  CHECK(format_csv(f) == format_csv(parse_csv(format_csv(f), f.specs())));
}

TEST_CASE("format_double round trips") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(12.0) == "12");
}

TEST_CASE("schema json round trip") {
  const auto s = default_schema();
  CHECK(schema_from_json(schema_to_json(s)) == s);
  CHECK(schema_from_json("\"default\"") == s);
  CHECK(code_of([] { schema_from_json("{"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { schema_from_json(R"([{"name":"a","kind":"weird"}])"); }) == ErrorCode::kConfig);
}

TEST_CASE("forward fill carries the last observation") {
  const auto f = parse_csv(
      "timestamp,load\n2013-01-01T01:00:00Z,\n2013-01-01T02:00:00Z,5\n2013-01-01T05:00:00Z,7\n", load_only());
  const auto g = forward_fill(f);
  CHECK(g.missing(0, 0));
  CHECK(g.value(1, 0) == 5);
  CHECK(g.value(2, 0) == 5);
  CHECK(g.value(3, 0) == 5);
  CHECK(g.value(4, 0) == 7);
  CHECK(f.missing(2, 0));
}

TEST_CASE("slice and column replacement") {
  Rng rng(5);
  const auto f = testing::random_frame(rng, 48);
  const auto s = f.slice({f.start() + 10, f.start() + 20});
  CHECK(s.rows() == 10);
  CHECK(s.start() == f.start() + 10);
  CHECK(s.value(0, 0) == f.value(10, 0));
  CHECK(f.slice({f.start() - 5, f.start() + 100}).rows() == 48);
  CHECK(code_of([&] { f.slice({f.start() + 60, f.start() + 70}); }) == ErrorCode::kArgument);

  std::vector<double> col(48, 1.5);
  col[3] = std::nan("");
  const auto g = f.with_column(1, col);
  CHECK(g.value(0, 1) == 1.5);
  CHECK(g.missing(3, 1));
  CHECK(g.value(0, 0) == f.value(0, 0));
  CHECK(f.index_of("cat") == 3);
  CHECK(code_of([&] { f.index_of("nope"); }) == ErrorCode::kSchema);
  CHECK(f.row_of(f.start() + 47) == 47u);
  CHECK_FALSE(f.row_of(f.start() + 48).has_value());
}

TEST_CASE("hourly grid invariant holds after load") {
  const auto f = parse_csv(
      "timestamp,load\n2013-03-10T00:00:00Z,1\n2013-03-10T09:00:00Z,2\n2013-03-09T20:00:00Z,3\n", load_only());
  CHECK(f.rows() == 14);
  for (std::size_t i = 0; i + 1 < f.rows(); ++i) CHECK(f.timestamp(i + 1) - f.timestamp(i) == 1);
}
