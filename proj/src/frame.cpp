// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kind_name(FeatureKind k) { return k == FeatureKind::kCategorical ? "categorical" : "continuous"; }

const char* role_name(FeatureRole r) {
  switch (r) {
    case FeatureRole::kTarget: return "target";
    case FeatureRole::kExogenous: return "exogenous";
    case FeatureRole::kCalendar: return "calendar";
  }
  return "exogenous";
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    std::string_view field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

TimeSeriesFrame::TimeSeriesFrame(Timestamp start, std::vector<FeatureSpec> specs, std::vector<double> values,
                                 std::vector<std::uint8_t> missing)
    : start_(start), specs_(std::move(specs)), values_(std::move(values)), missing_(std::move(missing)) {
  const std::size_t f = specs_.size();
  if (f == 0) fail(ErrorCode::kSchema, "frame needs at least one feature");
  if (values_.size() % f != 0) fail(ErrorCode::kDimension, "frame values not a multiple of the feature count");
  rows_ = values_.size() / f;
  if (missing_.empty()) missing_.assign(values_.size(), 0);
  if (missing_.size() != values_.size()) fail(ErrorCode::kDimension, "missing mask shape differs from values");

  int targets = 0;
  for (std::size_t j = 0; j < f; ++j) {
    const FeatureSpec& s = specs_[j];
    for (std::size_t k = 0; k < j; ++k)
      if (specs_[k].name == s.name) fail(ErrorCode::kSchema, "duplicate feature name '" + s.name + "'");
    if (s.role == FeatureRole::kTarget) {
      ++targets;
      target_ = j;
      if (s.categorical()) fail(ErrorCode::kSchema, "target feature '" + s.name + "' must be continuous");
    }
    if (s.categorical() && s.cardinality <= 0) {
      fail(ErrorCode::kSchema, "categorical feature '" + s.name + "' needs a positive cardinality");
    }
  }
  if (targets != 1) fail(ErrorCode::kSchema, "frame needs exactly one target feature, found " + std::to_string(targets));

  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const std::size_t k = i * f + j;
      if (missing_[k]) {
        missing_[k] = 1;
        values_[k] = kNaN;
        continue;
      }
      const double v = values_[k];
      if (!std::isfinite(v)) {
        fail(ErrorCode::kData, "non-finite value in '" + specs_[j].name + "' at " + timestamp(i).iso());
      }
      if (specs_[j].categorical() && (v != std::floor(v) || v < 0 || v >= specs_[j].cardinality)) {
        fail(ErrorCode::kSchema, "categorical '" + specs_[j].name + "' value " + format_double(v) + " at " +
                                     timestamp(i).iso() + " outside [0, " + std::to_string(specs_[j].cardinality) + ")");
      }
    }
  }
}

std::optional<std::size_t> TimeSeriesFrame::row_of(Timestamp t) const {
  const std::int64_t d = t - start_;
  if (d < 0 || d >= static_cast<std::int64_t>(rows_)) return std::nullopt;
  return static_cast<std::size_t>(d);
}

std::optional<std::size_t> TimeSeriesFrame::find(const std::string& name) const {
  for (std::size_t j = 0; j < specs_.size(); ++j)
    if (specs_[j].name == name) return j;
  return std::nullopt;
}

std::size_t TimeSeriesFrame::index_of(const std::string& name) const {
  if (auto j = find(name)) return *j;
  fail(ErrorCode::kSchema, "frame has no feature named '" + name + "'");
}

bool TimeSeriesFrame::row_complete(std::size_t row) const {
  const std::size_t f = specs_.size();
  for (std::size_t j = 0; j < f; ++j)
    if (missing_[row * f + j]) return false;
  return true;
}

std::vector<double> TimeSeriesFrame::column(std::size_t f) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = value(i, f);
  return out;
}

TimeSeriesFrame TimeSeriesFrame::slice(TimeRange range) const {
  const std::int64_t b = std::max<std::int64_t>(range.begin - start_, 0);
  const std::int64_t e = std::min<std::int64_t>(range.end - start_, static_cast<std::int64_t>(rows_));
  if (e <= b) fail(ErrorCode::kArgument, "slice [" + range.begin.iso() + ", " + range.end.iso() + ") is empty in frame");
  const std::size_t f = specs_.size();
  std::vector<double> v(values_.begin() + b * f, values_.begin() + e * f);
  std::vector<std::uint8_t> m(missing_.begin() + b * f, missing_.begin() + e * f);
  return TimeSeriesFrame(start_ + b, specs_, std::move(v), std::move(m));
}

TimeSeriesFrame TimeSeriesFrame::with_column(std::size_t f, std::span<const double> column) const {
  if (column.size() != rows_) fail(ErrorCode::kDimension, "replacement column has wrong length");
  std::vector<double> v = values_;
  std::vector<std::uint8_t> m = missing_;
  const std::size_t nf = specs_.size();
  for (std::size_t i = 0; i < rows_; ++i) {
    v[i * nf + f] = column[i];
    m[i * nf + f] = std::isnan(column[i]) ? 1 : 0;
  }
  return TimeSeriesFrame(start_, specs_, std::move(v), std::move(m));
}

TimeSeriesFrame TimeSeriesFrame::with_features(std::span<const FeatureSpec> extra, std::span<const double> values) const {
  const std::size_t k = extra.size();
  const std::size_t f = specs_.size();
  if (values.size() != rows_ * k) fail(ErrorCode::kDimension, "appended feature block has wrong size");
  std::vector<FeatureSpec> specs = specs_;
  specs.insert(specs.end(), extra.begin(), extra.end());
  std::vector<double> v(rows_ * (f + k));
  std::vector<std::uint8_t> m(rows_ * (f + k), 0);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(&values_[i * f], f, &v[i * (f + k)]);
    std::copy_n(&missing_[i * f], f, &m[i * (f + k)]);
    std::copy_n(&values[i * k], k, &v[i * (f + k) + f]);
  }
  return TimeSeriesFrame(start_, std::move(specs), std::move(v), std::move(m));
}

bool TimeSeriesFrame::operator==(const TimeSeriesFrame& o) const {
  if (start_ != o.start_ || rows_ != o.rows_ || specs_ != o.specs_ || missing_ != o.missing_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (missing_[i]) continue;
    if (values_[i] != o.values_[i]) return false;
  }
  return true;
}

std::vector<FeatureSpec> default_schema() {
  using K = FeatureKind;
  using R = FeatureRole;
  return {
      {"load", K::kContinuous, R::kTarget, 0, "MW"},
      {"temperature", K::kContinuous, R::kExogenous, 0, "degC"},
      {"dewpoint", K::kContinuous, R::kExogenous, 0, "degC"},
      {"wind_speed", K::kContinuous, R::kExogenous, 0, "km/h"},
      {"humidity", K::kContinuous, R::kExogenous, 0, "%"},
      {"rainfall", K::kContinuous, R::kExogenous, 0, "mm"},
      {"holiday_id", K::kCategorical, R::kCalendar, 32, "id"},
      {"school", K::kCategorical, R::kCalendar, 2, "bool"},
  };
}

std::vector<FeatureSpec> schema_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("schema is not valid JSON: ") + e.what());
  }
  if (j.is_string() && j.get<std::string>() == "default") return default_schema();
  if (!j.is_array()) fail(ErrorCode::kConfig, "schema must be \"default\" or an array of feature objects");
  std::vector<FeatureSpec> out;
  for (const auto& e : j) {
    FeatureSpec s;
    s.name = e.at("name").get<std::string>();
    const std::string kind = e.value("kind", "continuous");
    const std::string role = e.value("role", "exogenous");
    if (kind == "continuous") s.kind = FeatureKind::kContinuous;
    else if (kind == "categorical") s.kind = FeatureKind::kCategorical;
    else fail(ErrorCode::kConfig, "feature '" + s.name + "': unknown kind '" + kind + "'");
    if (role == "target") s.role = FeatureRole::kTarget;
    else if (role == "exogenous") s.role = FeatureRole::kExogenous;
    else if (role == "calendar") s.role = FeatureRole::kCalendar;
    else fail(ErrorCode::kConfig, "feature '" + s.name + "': unknown role '" + role + "'");
    s.cardinality = e.value("cardinality", 0);
    s.units = e.value("units", "");
    out.push_back(std::move(s));
  }
  return out;
}

std::string schema_to_json(std::span<const FeatureSpec> specs) {
  nlohmann::json j = nlohmann::json::array();
  for (const FeatureSpec& s : specs) {
    nlohmann::json e{{"name", s.name}, {"kind", kind_name(s.kind)}, {"role", role_name(s.role)}, {"units", s.units}};
    if (s.categorical()) e["cardinality"] = s.cardinality;
    j.push_back(std::move(e));
  }
  return j.dump();
}

TimeSeriesFrame parse_csv(const std::string& text, const std::vector<FeatureSpec>& schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, "CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() != schema.size() + 1 || header[0] != "timestamp") {
    fail(ErrorCode::kSchema, "CSV header must be 'timestamp' followed by the schema names");
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (header[j + 1] != schema[j].name) {
      fail(ErrorCode::kSchema, "CSV column " + std::to_string(j + 2) + " is '" + std::string(header[j + 1]) +
                                   "', schema expects '" + schema[j].name + "'");
    }
  }

  const std::size_t f = schema.size();
  std::map<std::int64_t, std::pair<std::vector<double>, std::vector<std::uint8_t>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != f + 1) {
      fail(ErrorCode::kParse, "CSV row " + std::to_string(line_no) + ": expected " + std::to_string(f + 1) +
                                  " fields, got " + std::to_string(fields.size()));
    }
    Timestamp ts;
    try {
      ts = Timestamp::parse_iso(fields[0]);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, "CSV row " + std::to_string(line_no) + ": " + e.what());
    }
    std::vector<double> v(f, kNaN);
    std::vector<std::uint8_t> m(f, 0);
    for (std::size_t j = 0; j < f; ++j) {
      const std::string_view cell = fields[j + 1];
      if (cell.empty()) {
        m[j] = 1;
        continue;
      }
      double x = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        fail(ErrorCode::kParse, "CSV row " + std::to_string(line_no) + ": '" + std::string(cell) + "' is not a number in column '" +
                                    schema[j].name + "'");
      }
      if (schema[j].categorical() && (x != std::floor(x) || x < 0 || x >= schema[j].cardinality)) {
        fail(ErrorCode::kSchema, "CSV row " + std::to_string(line_no) + ": categorical '" + schema[j].name + "' value " +
                                     std::string(cell) + " outside [0, " + std::to_string(schema[j].cardinality) + ")");
      }
      v[j] = x;
    }
    if (!rows.emplace(ts.hours(), std::make_pair(std::move(v), std::move(m))).second) {
      fail(ErrorCode::kData, "CSV row " + std::to_string(line_no) + ": duplicate timestamp " + ts.iso());
    }
  }
  if (rows.empty()) fail(ErrorCode::kData, "CSV has no data rows");

  const std::int64_t first = rows.begin()->first;
  const std::int64_t last = rows.rbegin()->first;
  const std::size_t t = static_cast<std::size_t>(last - first + 1);
  std::vector<double> values(t * f, kNaN);
  std::vector<std::uint8_t> missing(t * f, 1);
  for (const auto& [h, row] : rows) {
    const std::size_t i = static_cast<std::size_t>(h - first);
    std::copy(row.first.begin(), row.first.end(), values.begin() + i * f);
    std::copy(row.second.begin(), row.second.end(), missing.begin() + i * f);
  }
  return TimeSeriesFrame(Timestamp::from_hours(first), schema, std::move(values), std::move(missing));
}

TimeSeriesFrame load_csv(const std::string& path, const std::vector<FeatureSpec>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema);
}

std::string format_csv(const TimeSeriesFrame& frame) {
  std::string out = "timestamp";
  for (const FeatureSpec& s : frame.specs()) out += "," + s.name;
  out += '\n';
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    out += frame.timestamp(i).iso();
    for (std::size_t j = 0; j < frame.features(); ++j) {
      out += ',';
      if (!frame.missing(i, j)) out += format_double(frame.value(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << format_csv(frame);
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

TimeSeriesFrame forward_fill(const TimeSeriesFrame& frame) {
  std::vector<double> v = frame.values();
  std::vector<std::uint8_t> m = frame.missing_mask();
  const std::size_t f = frame.features();
  for (std::size_t j = 0; j < f; ++j) {
    bool have = false;
    double last = 0.0;
    for (std::size_t i = 0; i < frame.rows(); ++i) {
      const std::size_t k = i * f + j;
      if (!m[k]) {
        have = true;
        last = v[k];
      } else if (have) {
        v[k] = last;
        m[k] = 0;
      }
    }
  }
  return TimeSeriesFrame(frame.start(), frame.specs(), std::move(v), std::move(m));
}

}  // namespace mvlf
