// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "mvlf/error.hpp"

namespace mvlf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kState: return "state";
    case ErrorCode::kFingerprint: return "fingerprint";
    case ErrorCode::kData: return "data";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

// Proleptic Gregorian conversions (H. Hinnant's civil algorithms).
std::int64_t days_from_civil(const CivilDate& date) {
  std::int64_t y = date.year;
  const unsigned m = static_cast<unsigned>(date.month);
  const unsigned d = static_cast<unsigned>(date.day);
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, bool& ok) {
  if (pos + len > text.size()) {
    ok = false;
    return 0;
  }
  int v = 0;
  const char* b = text.data() + pos;
  auto [p, ec] = std::from_chars(b, b + len, v);
  if (ec != std::errc() || p != b + len) ok = false;
  return v;
}

bool valid_date(const CivilDate& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

}  // namespace

CivilDate parse_date(std::string_view text) {
  bool ok = text.size() == 10 && text[4] == '-' && text[7] == '-';
  CivilDate d{read_int(text, 0, 4, ok), read_int(text, 5, 2, ok), read_int(text, 8, 2, ok)};
  if (!ok || !valid_date(d)) fail(ErrorCode::kParse, "malformed date '" + std::string(text) + "'");
  return d;
}

Timestamp Timestamp::from_civil(const CivilDate& date, int hour) {
  return Timestamp(days_from_civil(date) * 24 + hour);
}

Timestamp Timestamp::parse_iso(std::string_view text) {
  bool ok = text.size() >= 20 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
            text[13] == ':' && text[16] == ':';
  const CivilDate date{read_int(text, 0, 4, ok), read_int(text, 5, 2, ok), read_int(text, 8, 2, ok)};
  const int hh = read_int(text, 11, 2, ok);
  const int mm = read_int(text, 14, 2, ok);
  const int ss = read_int(text, 17, 2, ok);
  int offset_minutes = 0;
  if (ok) {
    const std::string_view zone = text.substr(19);
    if (zone == "Z") {
    } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
      const int oh = read_int(zone, 1, 2, ok);
      const int om = read_int(zone, 4, 2, ok);
      offset_minutes = (zone[0] == '-' ? -1 : 1) * (oh * 60 + om);
    } else {
      ok = false;
    }
  }
  if (!ok || !valid_date(date) || hh > 23 || mm > 59 || ss > 59) {
    fail(ErrorCode::kParse, "malformed timestamp '" + std::string(text) + "'");
  }
  const std::int64_t minutes = (days_from_civil(date) * 24 + hh) * 60 + mm - offset_minutes;
  if (ss != 0 || minutes % 60 != 0) {
    fail(ErrorCode::kParse, "timestamp not on an hour boundary '" + std::string(text) + "'");
  }
  return Timestamp(minutes / 60);
}

CivilDate Timestamp::date() const {
  std::int64_t days = hours_ >= 0 ? hours_ / 24 : (hours_ - 23) / 24;
  return civil_from_days(days);
}

int Timestamp::hour_of_day() const {
  const std::int64_t r = hours_ % 24;
  return static_cast<int>(r < 0 ? r + 24 : r);
}

int Timestamp::weekday() const {
  // 1970-01-01 was a Thursday (Monday = 0 -> Thursday = 3).
  const std::int64_t days = hours_ >= 0 ? hours_ / 24 : (hours_ - 23) / 24;
  const std::int64_t w = (days + 3) % 7;
  return static_cast<int>(w < 0 ? w + 7 : w);
}

std::string Timestamp::iso() const {
  const CivilDate d = date();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00:00Z", d.year, d.month, d.day, hour_of_day());
  return buf;
}

Timestamp Timestamp::add_months(int months) const {
  const CivilDate d = date();
  const int total = d.year * 12 + (d.month - 1) + months;
  CivilDate out{total / 12, total % 12 + 1, d.day};
  if (total < 0) fail(ErrorCode::kArgument, "month arithmetic underflow");
  out.day = std::min(out.day, days_in_month(out.year, out.month));
  return from_civil(out, hour_of_day());
}

}  // namespace mvlf
