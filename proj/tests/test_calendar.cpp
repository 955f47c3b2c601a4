// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "helpers.hpp"
#include "mvlf/calendar.hpp"
#include "mvlf/error.hpp"

using namespace mvlf;

namespace {

TimeSeriesFrame hours_from(CivilDate d, int hour, std::size_t n) {
  std::vector<FeatureSpec> specs{{"load", FeatureKind::kContinuous, FeatureRole::kTarget, 0, "MW"}};
  return TimeSeriesFrame(Timestamp::from_civil(d, hour), specs, std::vector<double>(n, 1.0), {});
}

std::vector<double> calendar_row(const TimeSeriesFrame& f, std::size_t row) {
  std::vector<double> out;
  for (const char* name : kCalendarViews) out.push_back(f.value(row, f.index_of(name)));
  return out;
}

}  // namespace

TEST_CASE("new year's day 2013 at midnight") {
  const auto f = derive_calendar_views(hours_from({2013, 1, 1}, 0, 1), RegionCalendar::builtin());
  const auto r = calendar_row(f, 0);
  CHECK(r[0] == 0);
  CHECK(r[1] == 1);  // Tuesday
  CHECK(r[2] == 0);
  CHECK(r[3] == 3);
  CHECK(r[4] != 0);
  CHECK(r[5] == 0);
}

TEST_CASE("mid july afternoon") {
  const auto f = derive_calendar_views(hours_from({2013, 7, 15}, 13, 1), RegionCalendar::builtin());
  const auto r = calendar_row(f, 0);
  CHECK(r[0] == 13);
  CHECK(r[1] == 0);
  CHECK(r[2] == 6);
  CHECK(r[3] == 1);
  CHECK(r[4] == 0);
  CHECK(r[5] == 0);
}

TEST_CASE("deriving twice is refused and originals are untouched") {
  const auto base = hours_from({2013, 1, 1}, 0, 48);
  const auto f = derive_calendar_views(base, RegionCalendar::builtin());
  CHECK(f.features() == base.features() + 6);
  CHECK(f.column(0) == base.column(0));
  CHECK(has_calendar_views(f));
  try {
    derive_calendar_views(f, RegionCalendar::builtin());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kState);
  }
}

TEST_CASE("cardinalities of the derived views") {
  const auto region = RegionCalendar::builtin();
  const auto f = derive_calendar_views(hours_from({2013, 1, 1}, 0, 1), region);
  CHECK(f.spec(f.index_of("hour")).cardinality == 24);
  CHECK(f.spec(f.index_of("weekday")).cardinality == 7);
  CHECK(f.spec(f.index_of("month")).cardinality == 12);
  CHECK(f.spec(f.index_of("season")).cardinality == 4);
  CHECK(f.spec(f.index_of("holiday")).cardinality == static_cast<int>(region.holidays().size()) + 1);
  CHECK(f.spec(f.index_of("school_period")).cardinality == 2);
}

TEST_CASE("seasons follow meteorological months, spring first") {
  const int expected[] = {3, 3, 0, 0, 0, 1, 1, 1, 2, 2, 2, 3};
  for (int m = 1; m <= 12; ++m) CHECK(season_of_month(m) == expected[m - 1]);
}

TEST_CASE("a year of hourly rows has consistent views") {
  const auto f = derive_calendar_views(hours_from({2016, 1, 1}, 0, 24 * 366), RegionCalendar::builtin());
  const std::size_t h = f.index_of("hour"), w = f.index_of("weekday"), m = f.index_of("month");
  for (std::size_t i = 0; i < f.rows(); ++i) {
    REQUIRE(f.value(i, h) == static_cast<double>(i % 24));
    REQUIRE(f.value(i, w) == static_cast<double>((i / 24 + 4) % 7));  // 2016-01-01 was a Friday
  }
  CHECK(f.value(24 * 365, m) == 11);
}

TEST_CASE("easter dates") {
  CHECK(easter_sunday(2000) == CivilDate{2000, 4, 23});
  CHECK(easter_sunday(2013) == CivilDate{2013, 3, 31});
  CHECK(easter_sunday(2016) == CivilDate{2016, 3, 27});
  CHECK(easter_sunday(2019) == CivilDate{2019, 4, 21});
  CHECK(easter_sunday(2038) == CivilDate{2038, 4, 25});
}

TEST_CASE("built-in holiday table for 2013") {
  const auto r = RegionCalendar::builtin();
  const CivilDate days[] = {{2013, 1, 1}, {2013, 2, 18}, {2013, 3, 29}, {2013, 5, 20}, {2013, 7, 1},
                            {2013, 8, 5}, {2013, 9, 2},  {2013, 10, 14}, {2013, 12, 25}, {2013, 12, 26}};
  for (int i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(r.holiday_id(days[i]) == i + 1);
  }
  CHECK(r.holiday_id({2013, 2, 11}) == 0);
  CHECK(r.holiday_id({2013, 5, 27}) == 0);
  int count = 0;
  for (std::int64_t d = days_from_civil({2013, 1, 1}); d < days_from_civil({2014, 1, 1}); ++d)
    count += r.holiday_id(civil_from_days(d)) != 0;
  CHECK(count == 10);
}

TEST_CASE("school periods wrap and exclude breaks") {
  const auto r = RegionCalendar::builtin();
  CHECK(r.in_school({2013, 10, 1}));
  CHECK(r.in_school({2013, 1, 15}));
  CHECK_FALSE(r.in_school({2013, 7, 15}));
  CHECK_FALSE(r.in_school({2013, 3, 12}));
  CHECK_FALSE(r.in_school({2013, 12, 28}));
}

TEST_CASE("shipped ontario region file matches the built-in table") {
  const auto file = RegionCalendar::load(std::string(MVLF_SOURCE_DIR) + "/data/regions/ontario.json");
  const auto builtin = RegionCalendar::builtin();
  CHECK(file.holidays().size() == builtin.holidays().size());
  for (std::int64_t d = days_from_civil({2010, 1, 1}); d < days_from_civil({2020, 1, 1}); ++d) {
    const CivilDate c = civil_from_days(d);
    REQUIRE(file.holiday_id(c) == builtin.holiday_id(c));
    REQUIRE(file.in_school(c) == builtin.in_school(c));
  }
}

TEST_CASE("region table errors are configuration errors") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  CHECK(code([] { RegionCalendar::load("/nonexistent/region.json"); }) == ErrorCode::kConfig);
  CHECK(code([] { RegionCalendar::from_json("{}"); }) == ErrorCode::kConfig);
  CHECK(code([] { RegionCalendar::from_json(R"({"holidays":[{"month":2}]})"); }) == ErrorCode::kConfig);
}

TEST_CASE("explicit date rules and last-weekday rules") {
  const auto r = RegionCalendar::from_json(R"({"holidays":[
      {"name":"a","dates":["2014-06-02","2015-06-08"]},
      {"name":"b","month":5,"weekday":0,"nth":-1}],
      "school_periods":[{"start":"2014-01-10","end":"2014-01-12"}]})");
  CHECK(r.holiday_id({2014, 6, 2}) == 1);
  CHECK(r.holiday_id({2016, 6, 2}) == 0);
  CHECK(r.holiday_id({2013, 5, 27}) == 2);
  CHECK(r.holiday_id({2013, 5, 20}) == 0);
  CHECK(r.in_school({2014, 1, 11}));
  CHECK_FALSE(r.in_school({2015, 1, 11}));
}
