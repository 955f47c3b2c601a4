// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/calendar.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

namespace {

int weekday_of(const CivilDate& d) {
  const std::int64_t w = (days_from_civil(d) + 3) % 7;
  return static_cast<int>(w < 0 ? w + 7 : w);
}

std::pair<int, int> parse_month_day(const std::string& text) {
  const CivilDate d = parse_date("2000-" + text);  // leap year accepts 02-29
  return {d.month, d.day};
}

constexpr const char* kBuiltinRegion = R"({
  "name": "ontario",
  "holidays": [
    {"name": "New Year's Day", "fixed": "01-01"},
    {"name": "Family Day", "month": 2, "weekday": 0, "nth": 3},
    {"name": "Good Friday", "easter_offset": -2},
    {"name": "Victoria Day", "on_or_before": "05-24", "weekday": 0},
    {"name": "Canada Day", "fixed": "07-01"},
    {"name": "Civic Holiday", "month": 8, "weekday": 0, "nth": 1},
    {"name": "Labour Day", "month": 9, "weekday": 0, "nth": 1},
    {"name": "Thanksgiving", "month": 10, "weekday": 0, "nth": 2},
    {"name": "Christmas Day", "fixed": "12-25"},
    {"name": "Boxing Day", "fixed": "12-26"}
  ],
  "school_periods": [
    {"yearly_start": "09-03", "yearly_end": "12-20"},
    {"yearly_start": "01-06", "yearly_end": "03-08"},
    {"yearly_start": "03-18", "yearly_end": "06-27"}
  ]
})";

}  // namespace

CivilDate easter_sunday(int year) {
  // Anonymous Gregorian computus.
  const int a = year % 19, b = year / 100, c = year % 100;
  const int d = b / 4, e = b % 4, f = (b + 8) / 25, g = (b - f + 1) / 3;
  const int h = (19 * a + b - d - g + 15) % 30;
  const int i = c / 4, k = c % 4;
  const int l = (32 + 2 * e + 2 * i - h - k) % 7;
  const int m = (a + 11 * h + 22 * l) / 451;
  const int month = (h + l - 7 * m + 114) / 31;
  const int day = (h + l - 7 * m + 114) % 31 + 1;
  return {year, month, day};
}

bool HolidayRule::matches(const CivilDate& date) const {
  switch (kind) {
    case Kind::kFixed:
      return date.month == month && date.day == day;
    case Kind::kNthWeekday: {
      if (date.month != month || weekday_of(date) != weekday) return false;
      if (nth > 0) return (date.day - 1) / 7 + 1 == nth;
      return date.day + 7 > days_in_month(date.year, date.month);
    }
    case Kind::kOnOrBefore: {
      if (date.month != month || weekday_of(date) != weekday) return false;
      return date.day <= day && date.day > day - 7;
    }
    case Kind::kEasterOffset:
      return days_from_civil(date) == days_from_civil(easter_sunday(date.year)) + offset;
    case Kind::kDates:
      for (const CivilDate& d : dates)
        if (d == date) return true;
      return false;
  }
  return false;
}

bool SchoolPeriod::contains(const CivilDate& date) const {
  if (!yearly) return start <= date && date <= end;
  const int md = date.month * 100 + date.day;
  const int s = start.month * 100 + start.day;
  const int e = end.month * 100 + end.day;
  return s <= e ? (s <= md && md <= e) : (md >= s || md <= e);
}

RegionCalendar::RegionCalendar(std::string name, std::vector<HolidayRule> holidays, std::vector<SchoolPeriod> school)
    : name_(std::move(name)), holidays_(std::move(holidays)), school_(std::move(school)) {}

int RegionCalendar::holiday_id(const CivilDate& date) const {
  for (std::size_t i = 0; i < holidays_.size(); ++i)
    if (holidays_[i].matches(date)) return static_cast<int>(i) + 1;
  return 0;
}

bool RegionCalendar::in_school(const CivilDate& date) const {
  for (const SchoolPeriod& p : school_)
    if (p.contains(date)) return true;
  return false;
}

RegionCalendar RegionCalendar::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("region table is not valid JSON: ") + e.what());
  }
  if (!j.contains("holidays") || !j["holidays"].is_array()) fail(ErrorCode::kConfig, "region table has no 'holidays' array");
  std::vector<HolidayRule> rules;
  try {
    for (const auto& h : j["holidays"]) {
      HolidayRule r;
      r.name = h.at("name").get<std::string>();
      if (h.contains("fixed")) {
        r.kind = HolidayRule::Kind::kFixed;
        std::tie(r.month, r.day) = parse_month_day(h["fixed"].get<std::string>());
      } else if (h.contains("on_or_before")) {
        r.kind = HolidayRule::Kind::kOnOrBefore;
        std::tie(r.month, r.day) = parse_month_day(h["on_or_before"].get<std::string>());
        r.weekday = h.at("weekday").get<int>();
      } else if (h.contains("easter_offset")) {
        r.kind = HolidayRule::Kind::kEasterOffset;
        r.offset = h["easter_offset"].get<int>();
      } else if (h.contains("dates")) {
        r.kind = HolidayRule::Kind::kDates;
        for (const auto& d : h["dates"]) r.dates.push_back(parse_date(d.get<std::string>()));
      } else {
        r.kind = HolidayRule::Kind::kNthWeekday;
        r.month = h.at("month").get<int>();
        r.weekday = h.at("weekday").get<int>();
        r.nth = h.value("nth", 1);
      }
      rules.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed holiday rule: ") + e.what());
  }
  std::vector<SchoolPeriod> school;
  if (j.contains("school_periods")) {
    for (const auto& p : j["school_periods"]) {
      SchoolPeriod s;
      if (p.contains("yearly_start")) {
        s.yearly = true;
        std::tie(s.start.month, s.start.day) = parse_month_day(p["yearly_start"].get<std::string>());
        std::tie(s.end.month, s.end.day) = parse_month_day(p.at("yearly_end").get<std::string>());
      } else {
        s.start = parse_date(p.at("start").get<std::string>());
        s.end = parse_date(p.at("end").get<std::string>());
      }
      school.push_back(s);
    }
  }
  return RegionCalendar(j.value("name", "region"), std::move(rules), std::move(school));
}

RegionCalendar RegionCalendar::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfig, "region table '" + path + "' not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

RegionCalendar RegionCalendar::builtin() { return from_json(kBuiltinRegion); }

int season_of_month(int month) {
  if (month >= 3 && month <= 5) return 0;
  if (month >= 6 && month <= 8) return 1;
  if (month >= 9 && month <= 11) return 2;
  return 3;
}

bool has_calendar_views(const TimeSeriesFrame& frame) {
  for (const char* name : kCalendarViews)
    if (frame.find(name)) return true;
  return false;
}

TimeSeriesFrame derive_calendar_views(const TimeSeriesFrame& frame, const RegionCalendar& region) {
  if (has_calendar_views(frame)) fail(ErrorCode::kState, "frame already carries derived calendar views");
  using K = FeatureKind;
  using R = FeatureRole;
  const FeatureSpec extra[] = {
      {"hour", K::kCategorical, R::kCalendar, 24, "hour"},
      {"weekday", K::kCategorical, R::kCalendar, 7, "day"},
      {"month", K::kCategorical, R::kCalendar, 12, "month"},
      {"season", K::kCategorical, R::kCalendar, 4, "season"},
      {"holiday", K::kCategorical, R::kCalendar, region.holiday_cardinality(), "id"},
      {"school_period", K::kCategorical, R::kCalendar, 2, "bool"},
  };
  std::vector<double> values(frame.rows() * 6);
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    const Timestamp t = frame.timestamp(i);
    const CivilDate d = t.date();
    double* row = &values[i * 6];
    row[0] = t.hour_of_day();
    row[1] = t.weekday();
    row[2] = d.month - 1;
    row[3] = season_of_month(d.month);
    row[4] = region.holiday_id(d);
    row[5] = region.in_school(d) ? 1 : 0;
  }
  return frame.with_features(extra, values);
}

}  // namespace mvlf
