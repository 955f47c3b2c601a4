// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/explain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::vector<ViewGroup> default_view_groups(const std::vector<FeatureSpec>& specs) {
  const std::vector<ViewGroup> panels = {
      {"long_term", {"month", "season"}},
      {"short_term", {"hour", "weekday"}},
      {"temperature", {"temperature", "dewpoint"}},
      {"weather", {"wind_speed", "humidity", "rainfall"}},
      {"holiday", {"holiday_id", "school", "holiday", "school_period"}},
  };
  std::set<std::string> present, used;
  for (const FeatureSpec& s : specs)
    if (s.role != FeatureRole::kTarget) present.insert(s.name);
  std::vector<ViewGroup> out;
  for (const ViewGroup& g : panels) {
    ViewGroup kept{g.name, {}};
    for (const std::string& v : g.views) {
      if (present.count(v)) {
        kept.views.push_back(v);
        used.insert(v);
      }
    }
    if (!kept.views.empty()) out.push_back(std::move(kept));
  }
  ViewGroup other{"other", {}};
  for (const FeatureSpec& s : specs)
    if (s.role != FeatureRole::kTarget && !used.count(s.name)) other.views.push_back(s.name);
  if (!other.views.empty()) out.push_back(std::move(other));
  return out;
}

void validate_view_groups(const std::vector<ViewGroup>& groups, const std::vector<FeatureSpec>& specs) {
  std::set<std::string> names;
  for (const ViewGroup& g : groups) {
    if (g.name.empty() || g.name == "combined") fail(ErrorCode::kConfig, "view group needs a name other than 'combined'");
    if (!names.insert(g.name).second) fail(ErrorCode::kConfig, "duplicate view group '" + g.name + "'");
  }
  std::set<std::string> seen;
  for (const ViewGroup& g : groups) {
    for (const std::string& v : g.views) {
      const auto it = std::find_if(specs.begin(), specs.end(), [&](const FeatureSpec& s) { return s.name == v; });
      if (it == specs.end()) fail(ErrorCode::kConfig, "view group '" + g.name + "' references unknown view '" + v + "'");
      if (it->role == FeatureRole::kTarget) fail(ErrorCode::kConfig, "view group '" + g.name + "' lists the target");
      if (!seen.insert(v).second) fail(ErrorCode::kConfig, "view '" + v + "' appears in more than one group");
    }
  }
  for (const FeatureSpec& s : specs) {
    if (s.role != FeatureRole::kTarget && !seen.count(s.name)) {
      fail(ErrorCode::kConfig, "view '" + s.name + "' belongs to no group");
    }
  }
}

std::vector<ViewGroup> view_groups_from_json(const std::string& text) {
  std::vector<ViewGroup> out;
  try {
    const json j = json::parse(text);
    for (const json& g : j) out.push_back({g.at("name").get<std::string>(), g.at("views").get<std::vector<std::string>>()});
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed view groups: ") + e.what());
  }
  return out;
}

std::vector<std::uint8_t> group_mask(const ViewGroup& group, const std::vector<FeatureSpec>& specs) {
  std::vector<std::uint8_t> keep(specs.size(), 0);
  for (std::size_t f = 0; f < specs.size(); ++f) {
    if (specs[f].role == FeatureRole::kTarget) keep[f] = 1;
  }
  for (const std::string& v : group.views) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const FeatureSpec& s) { return s.name == v; });
    if (it == specs.end()) fail(ErrorCode::kArgument, "view group '" + group.name + "' references unknown view '" + v + "'");
    keep[static_cast<std::size_t>(it - specs.begin())] = 1;
  }
  return keep;
}

namespace {

std::vector<Timestamp> tiling_anchors(const ModelPredictor& p, const TimeSeriesFrame& prepared, TimeRange range,
                                      int horizon) {
  if (horizon < 1 || horizon % p.chunk() != 0) {
    fail(ErrorCode::kConfig, "horizon " + std::to_string(horizon) + " is not a positive multiple of the model's " +
                                 std::to_string(p.chunk()) + "h chunk");
  }
  std::vector<Timestamp> out;
  for (Timestamp t = range.begin; t + horizon < range.end; t = t + horizon) {
    if (p.covered(prepared, t, horizon)) out.push_back(t);
  }
  return out;
}

std::vector<double> run_series(const ModelPredictor& p, const TimeSeriesFrame& prepared,
                               const std::vector<Timestamp>& anchors, int horizon) {
  std::vector<double> out;
  for (const Timestamp& t : anchors) {
    const auto chunk = p.rollout(prepared, t, horizon);
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

}  // namespace

IsolationResult isolate_views(const TrainedModel& model, const TimeSeriesFrame& raw,
                              const std::vector<ViewGroup>& groups, TimeRange range, int horizon) {
  const auto& specs = model.params.specs();
  for (const ViewGroup& g : groups) group_mask(g, specs);
  const ModelPredictor combined(model);
  const TimeSeriesFrame prepared = combined.prepare(raw);
  const auto anchors = tiling_anchors(combined, prepared, range, horizon);
  if (anchors.empty()) fail(ErrorCode::kData, "no forecastable anchor in " + range.begin.iso() + " .. " + range.end.iso());

  IsolationResult r;
  const std::size_t target = raw.target_index();
  for (const Timestamp& t : anchors) {
    const std::size_t row = *raw.row_of(t);
    for (int h = 1; h <= horizon; ++h) {
      const std::size_t rr = row + static_cast<std::size_t>(h);
      r.times.push_back(t + h);
      r.truth.push_back(raw.missing(rr, target) ? std::numeric_limits<double>::quiet_NaN() : raw.value(rr, target));
    }
  }
  r.series.push_back({"combined", run_series(combined, prepared, anchors, horizon)});
  for (const ViewGroup& g : groups) {
    const ModelPredictor masked(model, DropoutDirective::forced(group_mask(g, specs)));
    r.series.push_back({g.name, run_series(masked, prepared, anchors, horizon)});
  }
  return r;
}

std::vector<double> isolate_view(const TrainedModel& model, const TimeSeriesFrame& raw, const ViewGroup& group,
                                 TimeRange range, int horizon) {
  const ModelPredictor masked(model, DropoutDirective::forced(group_mask(group, model.params.specs())));
  const TimeSeriesFrame prepared = masked.prepare(raw);
  return run_series(masked, prepared, tiling_anchors(masked, prepared, range, horizon), horizon);
}

std::string IsolationResult::to_csv() const {
  std::string out = "timestamp,truth";
  for (const IsolationSeries& s : series) out += "," + s.name;
  out += "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += times[i].iso() + "," + (std::isnan(truth[i]) ? std::string() : format_double(truth[i]));
    for (const IsolationSeries& s : series) out += "," + format_double(s.values[i]);
    out += "\n";
  }
  return out;
}

std::string IsolationResult::manifest_json(const std::string& units) const {
  ojson j;
  ojson names = ojson::array();
  names.push_back("truth");
  for (const IsolationSeries& s : series) names.push_back(s.name);
  j["series"] = names;
  j["units"] = units;
  j["points"] = times.size();
  j["first"] = times.empty() ? "" : times.front().iso();
  j["last"] = times.empty() ? "" : times.back().iso();
  return j.dump(2) + "\n";
}

namespace {

std::string category_label(const std::string& view, int c) {
  static const char* const kSeason[] = {"Spring", "Summer", "Autumn", "Winter"};
  static const char* const kWeekday[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  static const char* const kMonth[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                       "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (view == "season" && c < 4) return kSeason[c];
  if (view == "weekday" && c < 7) return kWeekday[c];
  if (view == "month" && c < 12) return kMonth[c];
  return std::to_string(c);
}

double row_norm(const std::vector<double>& w) {
  double acc = 0.0;
  for (double x : w) acc += x * x;
  return std::sqrt(acc);
}

std::vector<double> row_of(const Matrix& m, std::size_t r) {
  return {m.data.begin() + static_cast<std::ptrdiff_t>(r * m.cols),
          m.data.begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols)};
}

}  // namespace

EmbeddingDump dump_embeddings(const ModelParams& params, const Scaler* scaler) {
  EmbeddingDump d;
  d.method = to_string(params.config().method);
  const auto& ps = params.parameters();
  const auto& specs = params.specs();
  for (std::size_t f = 0; f < specs.size(); ++f) {
    const ViewParams& vp = params.view_params()[f];
    ViewDump vd{specs[f].name, "", {}};
    switch (vp.kind) {
      case ViewParams::Kind::kTable: {
        vd.kind = "categorical";
        const Matrix& t = ps[vp.table].value;
        for (std::size_t c = 0; c < t.rows; ++c) {
          auto w = row_of(t, c);
          vd.cells.push_back({category_label(specs[f].name, static_cast<int>(c)), w, row_norm(w)});
        }
        break;
      }
      case ViewParams::Kind::kQuantized: {
        vd.kind = "quantized";
        const Matrix& t = ps[vp.table].value;
        const Quantizer& q = params.quantizers().at(f);
        for (std::size_t b = 0; b < t.rows; ++b) {
          double lo = q.edge(static_cast<int>(b)), hi = q.edge(static_cast<int>(b) + 1);
          if (scaler) {
            lo = scaler->unscale_value(f, lo);
            hi = scaler->unscale_value(f, hi);
          }
          auto w = row_of(t, b);
          vd.cells.push_back({"[" + format_double(lo) + ", " + format_double(hi) + ")", w, row_norm(w)});
        }
        break;
      }
      case ViewParams::Kind::kAffine: {
        vd.kind = "affine";
        auto w = ps[vp.weight].value.data;
        auto b = ps[vp.bias].value.data;
        vd.cells.push_back({"W", w, row_norm(w)});
        vd.cells.push_back({"b", b, row_norm(b)});
        break;
      }
    }
    d.views.push_back(std::move(vd));
    d.gate_views.push_back(specs[f].name);
  }
  d.gate = ps[params.gate()].value.data;
  return d;
}

std::string EmbeddingDump::to_json() const {
  ojson j;
  j["method"] = method;
  ojson vs = ojson::array();
  for (const ViewDump& v : views) {
    ojson cells = ojson::array();
    for (const EmbeddingCell& c : v.cells) {
      ojson cj;
      cj["label"] = c.label;
      cj["weights"] = c.weights;
      cj["norm"] = c.norm;
      cells.push_back(cj);
    }
    ojson vj;
    vj["view"] = v.view;
    vj["kind"] = v.kind;
    vj["cells"] = cells;
    vs.push_back(vj);
  }
  j["views"] = vs;
  ojson gate = ojson::array();
  for (std::size_t f = 0; f < gate_views.size(); ++f) gate.push_back({{"view", gate_views[f]}, {"weight", this->gate[f]}});
  j["gate"] = gate;
  return j.dump(2) + "\n";
}

EmbeddingDump EmbeddingDump::from_json(const std::string& text) {
  EmbeddingDump d;
  try {
    const json j = json::parse(text);
    d.method = j.at("method").get<std::string>();
    for (const json& v : j.at("views")) {
      ViewDump vd{v.at("view").get<std::string>(), v.at("kind").get<std::string>(), {}};
      for (const json& c : v.at("cells")) {
        vd.cells.push_back({c.at("label").get<std::string>(), c.at("weights").get<std::vector<double>>(),
                            c.at("norm").get<double>()});
      }
      d.views.push_back(std::move(vd));
    }
    for (const json& g : j.at("gate")) {
      d.gate_views.push_back(g.at("view").get<std::string>());
      d.gate.push_back(g.at("weight").get<double>());
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed embedding dump: ") + e.what());
  }
  return d;
}

std::string EmbeddingDump::to_csv() const {
  std::string out = "view,kind,position,label,norm,weights\n";
  for (const ViewDump& v : views) {
    for (std::size_t i = 0; i < v.cells.size(); ++i) {
      std::string w;
      for (std::size_t k = 0; k < v.cells[i].weights.size(); ++k) w += (k ? " " : "") + format_double(v.cells[i].weights[k]);
      out += v.view + "," + v.kind + "," + std::to_string(i) + ",\"" + v.cells[i].label + "\"," +
             format_double(v.cells[i].norm) + "," + w + "\n";
    }
  }
  for (std::size_t f = 0; f < gate_views.size(); ++f) {
    out += gate_views[f] + ",gate,0,\"gate\"," + format_double(std::abs(gate[f])) + "," + format_double(gate[f]) + "\n";
  }
  return out;
}

Svd svd_jacobi(const Matrix& a) {
  if (a.rows < a.cols) {
    Svd t = svd_jacobi(transpose(a));
    return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }
  const std::size_t m = a.rows, n = a.cols;
  Matrix u = a;
  Matrix v = Matrix::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += u(i, j) * u(i, j);
    sigma[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  Svd out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = sigma[j] > 0.0 ? u(i, j) / sigma[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
  }
  return out;
}

Matrix svd_reconstruct(const Svd& s) {
  Matrix us = s.u;
  for (std::size_t i = 0; i < us.rows; ++i)
    for (std::size_t k = 0; k < us.cols; ++k) us(i, k) *= s.sigma[k];
  return multiply(us, transpose(s.v));
}

namespace {

SvdEntry analyse(const std::string& name, const Matrix& a) {
  SvdEntry e{name, a.rows, a.cols, {}, 0.0, a.frobenius()};
  const Svd s = svd_jacobi(a);
  e.sigma = s.sigma;
  const Matrix r = svd_reconstruct(s);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += (r.data[i] - a.data[i]) * (r.data[i] - a.data[i]);
  e.reconstruction_error = std::sqrt(acc);
  return e;
}

}  // namespace

SvdReport svd_embeddings(const ModelParams& params) {
  SvdReport report;
  const auto& ps = params.parameters();
  const std::size_t d = static_cast<std::size_t>(params.config().d);
  Matrix all(0, d);
  for (std::size_t f = 0; f < params.views(); ++f) {
    const ViewParams& vp = params.view_params()[f];
    Matrix m;
    if (vp.kind == ViewParams::Kind::kAffine) {
      m = Matrix(2, d);
      std::copy(ps[vp.weight].value.data.begin(), ps[vp.weight].value.data.end(), m.data.begin());
      std::copy(ps[vp.bias].value.data.begin(), ps[vp.bias].value.data.end(), m.data.begin() + static_cast<std::ptrdiff_t>(d));
    } else {
      m = ps[vp.table].value;
    }
    report.entries.push_back(analyse(params.specs()[f].name, m));
    all.data.insert(all.data.end(), m.data.begin(), m.data.end());
    all.rows += m.rows;
  }
  report.entries.push_back(analyse("all_views", all));
  return report;
}

std::string SvdReport::to_csv() const {
  std::string out = "matrix,rows,cols,index,sigma,reconstruction_error,norm\n";
  for (const SvdEntry& e : entries) {
    for (std::size_t k = 0; k < e.sigma.size(); ++k) {
      out += e.name + "," + std::to_string(e.rows) + "," + std::to_string(e.cols) + "," + std::to_string(k) + "," +
             format_double(e.sigma[k]) + "," + format_double(e.reconstruction_error) + "," + format_double(e.norm) + "\n";
    }
  }
  return out;
}

}  // namespace mvlf
