// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mvlf {

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const CivilDate&) const = default;
};

/// Hour-aligned UTC instant, stored as whole hours since 1970-01-01T00:00Z.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  static constexpr Timestamp from_hours(std::int64_t h) { return Timestamp(h); }
  static Timestamp from_civil(const CivilDate& date, int hour);

  /// Accepts `YYYY-MM-DDTHH:MM:SS` followed by `Z` or `+HH:MM`/`-HH:MM`.
  /// The result is normalized to UTC; non-zero minutes/seconds after
  /// normalization are rejected.
  static Timestamp parse_iso(std::string_view text);

  constexpr std::int64_t hours() const { return hours_; }
  CivilDate date() const;
  int hour_of_day() const;
  int weekday() const;  // Monday = 0
  std::string iso() const;  // 2013-01-01T00:00:00Z

  Timestamp add_months(int months) const;

  constexpr Timestamp operator+(std::int64_t h) const { return Timestamp(hours_ + h); }
  constexpr Timestamp operator-(std::int64_t h) const { return Timestamp(hours_ - h); }
  constexpr std::int64_t operator-(Timestamp o) const { return hours_ - o.hours_; }
  constexpr auto operator<=>(const Timestamp&) const = default;

 private:
  constexpr explicit Timestamp(std::int64_t h) : hours_(h) {}
  std::int64_t hours_ = 0;
};

/// Half-open interval [begin, end) of hours.
struct TimeRange {
  Timestamp begin;
  Timestamp end;

  std::int64_t hours() const { return end - begin; }
  bool contains(Timestamp t) const { return begin <= t && t < end; }
  bool operator==(const TimeRange&) const = default;
};

std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);
int days_in_month(int year, int month);
CivilDate parse_date(std::string_view text);  // YYYY-MM-DD

}  // namespace mvlf
