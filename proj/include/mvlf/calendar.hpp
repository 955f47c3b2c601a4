// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mvlf/frame.hpp"

namespace mvlf {

/// How one named holiday falls in a given year.
struct HolidayRule {
  enum class Kind { kFixed, kNthWeekday, kOnOrBefore, kEasterOffset, kDates };

  std::string name;
  Kind kind = Kind::kFixed;
  int month = 1;
  int day = 1;
  int weekday = 0;  // Monday = 0
  int nth = 1;      // -1 = last occurrence in the month
  int offset = 0;   // days from Easter Sunday
  std::vector<CivilDate> dates;

  bool matches(const CivilDate& date) const;
};

struct SchoolPeriod {
  // Explicit ranges use full dates; yearly ranges leave year = 0 and may
  // wrap over New Year (e.g. 09-03 .. 06-27).
  CivilDate start;
  CivilDate end;
  bool yearly = false;

  bool contains(const CivilDate& date) const;
};

/// A region's holiday table and school calendar. Holiday ids are the
/// 1-based position of the rule in the table; 0 means no holiday.
class RegionCalendar {
 public:
  RegionCalendar(std::string name, std::vector<HolidayRule> holidays, std::vector<SchoolPeriod> school);

  /// Reads the JSON region file. Missing file or missing tables raise kConfig.
  static RegionCalendar load(const std::string& path);
  static RegionCalendar from_json(const std::string& text);
  /// Compiled-in Ontario-style table used when no region file is given.
  static RegionCalendar builtin();

  const std::string& name() const { return name_; }
  int holiday_id(const CivilDate& date) const;
  bool in_school(const CivilDate& date) const;
  int holiday_cardinality() const { return static_cast<int>(holidays_.size()) + 1; }
  const std::vector<HolidayRule>& holidays() const { return holidays_; }

 private:
  std::string name_;
  std::vector<HolidayRule> holidays_;
  std::vector<SchoolPeriod> school_;
};

/// Names of the derived views, in the order they are appended.
inline constexpr const char* kCalendarViews[] = {"hour", "weekday", "month", "season", "holiday", "school_period"};

/// Seasons by meteorological months: Spring (Mar-May) = 0, Summer = 1,
/// Autumn = 2, Winter (Dec-Feb) = 3.
int season_of_month(int month);

/// Appends the six calendar views. Raises kState when the frame already
/// carries any of them.
TimeSeriesFrame derive_calendar_views(const TimeSeriesFrame& frame, const RegionCalendar& region);
bool has_calendar_views(const TimeSeriesFrame& frame);

CivilDate easter_sunday(int year);

}  // namespace mvlf
