// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mvlf/calendar.hpp"
#include "mvlf/error.hpp"
#include "mvlf/explain.hpp"
#include "mvlf/synth.hpp"

using namespace mvlf;

namespace {

TimeSeriesFrame small_dataset() {
  SynthOptions o;
  o.days = 30;
  return derive_calendar_views(synth_generate(o), RegionCalendar::builtin());
}

TrainedModel fresh_model(const TimeSeriesFrame& raw, Aggregation method, std::uint64_t seed = 1) {
  ModelConfig c = ModelConfig::defaults(method);
  if (method != Aggregation::kSvd) c.d = 4;
  c.ffn_width = 8;
  c.horizon = 24;
  Scaler scaler = Scaler::fit(raw, raw.span());
  ModelParams p = ModelParams::init(c, raw.specs(), seed);
  p.fit_quantizers(scaler.apply(raw), raw.span());
  Rng rng(seed + 100);
  for (Parameter& x : p.parameters())
    for (double& v : x.value.data) v += 0.1 * rng.normal();
  return {std::move(p), std::move(scaler), LagSet::defaults().capped(24)};
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.normal();
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("default groups partition the default views") {
  const auto raw = small_dataset();
  const auto groups = default_view_groups(raw.specs());
  REQUIRE(groups.size() == 5);
  CHECK(groups[0].name == "long_term");
  CHECK(groups[0].views == std::vector<std::string>{"month", "season"});
  CHECK(groups[1].views == std::vector<std::string>{"hour", "weekday"});
  CHECK(groups[2].views == std::vector<std::string>{"temperature", "dewpoint"});
  CHECK(groups[3].views == std::vector<std::string>{"wind_speed", "humidity", "rainfall"});
  CHECK_NOTHROW(validate_view_groups(groups, raw.specs()));
}

TEST_CASE("bad view groups are rejected") {
  const auto specs = small_dataset().specs();
  auto groups = default_view_groups(specs);
  auto code = [&](const std::vector<ViewGroup>& g) {
    try {
      validate_view_groups(g, specs);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  auto unknown = groups;
  unknown[0].views.push_back("sunspots");
  CHECK(code(unknown) == ErrorCode::kConfig);
  auto twice = groups;
  twice[1].views.push_back("month");
  CHECK(code(twice) == ErrorCode::kConfig);
  auto missing = groups;
  missing.pop_back();
  CHECK(code(missing) == ErrorCode::kConfig);
  auto target = groups;
  target[0].views.push_back("load");
  CHECK(code(target) == ErrorCode::kConfig);
  CHECK(view_groups_from_json(R"([{"name":"a","views":["hour"]}])")[0].views[0] == "hour");
  CHECK_THROWS_AS(view_groups_from_json("[{}]"), Error);
  CHECK_THROWS_AS(group_mask({"x", {"nope"}}, specs), Error);
}

TEST_CASE("a group holding every view reproduces the combined run") {
  const auto raw = small_dataset();
  const TrainedModel m = fresh_model(raw, Aggregation::kAdditive);
  ViewGroup all{"all", {}};
  for (const FeatureSpec& s : raw.specs())
    if (s.role != FeatureRole::kTarget) all.views.push_back(s.name);
  const TimeRange range{raw.start() + 48, raw.start() + 400};
  const auto r = isolate_views(m, raw, {all}, range, 24);
  REQUIRE(r.series.size() == 2);
  CHECK(r.series[0].name == "combined");
  CHECK(r.series[0].values == r.series[1].values);
  CHECK(r.series[1].values == isolate_view(m, raw, all, range, 24));
  CHECK(r.times.size() == r.series[0].values.size());
}

TEST_CASE("an empty group equals hand-zeroed embeddings at every anchor") {
  const auto raw = small_dataset();
  for (Aggregation method : {Aggregation::kAdditive, Aggregation::kConcatenative, Aggregation::kSvd}) {
    const TrainedModel m = fresh_model(raw, method);
    TrainedModel zeroed = m;
    for (const FeatureSpec& s : raw.specs()) {
      if (s.role == FeatureRole::kTarget) continue;
      for (Parameter& x : zeroed.params.parameters())
        if (x.name.rfind("embed." + s.name + ".", 0) == 0) std::fill(x.value.data.begin(), x.value.data.end(), 0.0);
    }
    const TimeRange range{raw.start() + 48, raw.start() + 300};
    const auto isolated = isolate_view(m, raw, {"none", {}}, range, 24);
    const ModelPredictor reference(zeroed);
    const auto prepared = reference.prepare(raw);
    std::vector<double> expected;
    for (Timestamp t = range.begin; t + 24 < range.end; t = t + 24) {
      const auto chunk = reference.rollout(prepared, t, 24);
      expected.insert(expected.end(), chunk.begin(), chunk.end());
    }
    CAPTURE(to_string(method));
    CHECK(isolated == expected);
  }
}

TEST_CASE("isolation is deterministic and panels differ") {
  const auto raw = small_dataset();
  const TrainedModel m = fresh_model(raw, Aggregation::kConcatenative);
  const auto groups = default_view_groups(raw.specs());
  const TimeRange range{raw.start() + 48, raw.start() + 500};
  const auto a = isolate_views(m, raw, groups, range, 24);
  const auto b = isolate_views(m, raw, groups, range, 24);
  CHECK(a.to_csv() == b.to_csv());
  REQUIRE(a.series.size() == groups.size() + 1);
  CHECK(a.series[1].values != a.series[2].values);
  CHECK(a.to_csv().rfind("timestamp,truth,combined,long_term,short_term,temperature,weather,holiday\n", 0) == 0);
  CHECK(a.manifest_json("MW").find("\"units\": \"MW\"") != std::string::npos);
  CHECK(a.times.front() == range.begin + 1);
  CHECK(a.truth.front() == raw.value(*raw.row_of(range.begin) + 1, 0));
  CHECK_THROWS_AS(isolate_views(m, raw, groups, range, 12), Error);
}

TEST_CASE("season cells run from spring to winter") {
  const auto raw = small_dataset();
  const TrainedModel m = fresh_model(raw, Aggregation::kSvd);
  const EmbeddingDump d = dump_embeddings(m.params, &m.scaler);
  const auto it = std::find_if(d.views.begin(), d.views.end(), [](const ViewDump& v) { return v.view == "season"; });
  REQUIRE(it != d.views.end());
  REQUIRE(it->cells.size() == 4);
  CHECK(it->cells[0].label == "Spring");
  CHECK(it->cells[3].label == "Winter");
  const Matrix& table = m.params.parameters()[m.params.view_params()[raw.index_of("season")].table].value;
  for (std::size_t c = 0; c < 4; ++c) {
    REQUIRE(it->cells[c].weights.size() == 1);
    CHECK(it->cells[c].weights[0] == table(c, 0));
  }
  CHECK(d.views.size() == raw.features());
  for (std::size_t f = 0; f < d.views.size(); ++f) CHECK(d.views[f].view == raw.spec(f).name);
  CHECK(d.gate.size() == raw.features());
}

TEST_CASE("dump tables match cardinalities and bins") {
  const auto raw = small_dataset();
  const TrainedModel m = fresh_model(raw, Aggregation::kSvd);
  const EmbeddingDump d = dump_embeddings(m.params, &m.scaler);
  for (std::size_t f = 0; f < raw.features(); ++f) {
    const FeatureSpec& s = raw.spec(f);
    if (s.kind == FeatureKind::kCategorical) {
      CHECK(d.views[f].kind == "categorical");
      CHECK(d.views[f].cells.size() == static_cast<std::size_t>(s.cardinality));
    } else {
      CHECK(d.views[f].kind == "quantized");
      CHECK(d.views[f].cells.size() == 16);
      CHECK(d.views[f].cells[0].label.front() == '[');
    }
  }
  const Quantizer& q = m.params.quantizers()[1];
  CHECK(d.views[1].cells[0].label ==
        "[" + format_double(m.scaler.unscale_value(1, q.edge(0))) + ", " + format_double(m.scaler.unscale_value(1, q.edge(1))) + ")");
}

TEST_CASE("fresh gates are all one") {
  const auto raw = small_dataset();
  const ModelParams p = ModelParams::init(ModelConfig::defaults(Aggregation::kAdditive), raw.specs(), 3);
  const EmbeddingDump d = dump_embeddings(p);
  CHECK(d.gate == std::vector<double>(raw.features(), 1.0));
  CHECK(d.views[0].kind == "affine");
  for (const EmbeddingCell& c : d.views[5].cells) CHECK(c.weights.size() == 32);
}

TEST_CASE("dump survives a json round trip") {
  const auto raw = small_dataset();
  for (Aggregation method : {Aggregation::kAdditive, Aggregation::kSvd}) {
    const TrainedModel m = fresh_model(raw, method);
    const EmbeddingDump d = dump_embeddings(m.params, &m.scaler);
    const EmbeddingDump back = EmbeddingDump::from_json(d.to_json());
    CHECK(back == d);
    CHECK(back.to_json() == d.to_json());
    CHECK(back.to_csv() == d.to_csv());
  }
  CHECK_THROWS_AS(EmbeddingDump::from_json("{\"method\":1}"), Error);
}

TEST_CASE("svd of simple matrices") {
  const Svd diag = svd_jacobi(Matrix(2, 2, {3, 0, 0, 1}));
  CHECK(diag.sigma == std::vector<double>{3, 1});
  const Svd swapped = svd_jacobi(Matrix(2, 2, {1, 0, 0, 3}));
  CHECK(swapped.sigma == std::vector<double>{3, 1});

  const std::vector<double> u{1, -2, 2}, v{3, 4};
  Matrix outer(3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) outer(i, j) = u[i] * v[j];
  const Svd r1 = svd_jacobi(outer);
  REQUIRE(r1.sigma.size() == 2);
  CHECK(r1.sigma[0] == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(r1.sigma[1] < 1e-12);
  CHECK(svd_jacobi(Matrix(2, 3)).sigma == std::vector<double>{0, 0});
}

TEST_CASE("singular values agree with the eigenvalues of the gram matrix") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 8, 4);
    Eigen::Matrix<double, 8, 4> e;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j) e(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    const Eigen::Matrix4d gram = e.transpose() * e;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(gram);
    Eigen::Vector4d ev = solver.eigenvalues();  // ascending
    const Svd s = svd_jacobi(a);
    REQUIRE(s.sigma.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(s.sigma[static_cast<std::size_t>(k)] == doctest::Approx(std::sqrt(std::max(0.0, ev(3 - k)))).epsilon(1e-10));
    for (std::size_t k = 0; k + 1 < 4; ++k) CHECK(s.sigma[k] >= s.sigma[k + 1]);
  }
}

TEST_CASE("reconstruction, orthogonality and row permutation invariance") {
  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(12), n = 1 + rng.below(12);
    const Matrix a = random_matrix(rng, m, n);
    const Svd s = svd_jacobi(a);
    REQUIRE(s.sigma.size() == std::min(m, n));
    CHECK(max_abs_diff(svd_reconstruct(s), a) <= 1e-9 * a.frobenius());
    for (double x : s.sigma) CHECK(x >= 0.0);
    const Matrix vtv = multiply(transpose(s.v), s.v);
    CHECK(max_abs_diff(vtv, Matrix::identity(s.sigma.size())) < 1e-12);

    Matrix p(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) = a(m - 1 - i, j);
    const Svd sp = svd_jacobi(p);
    for (std::size_t k = 0; k < s.sigma.size(); ++k) CHECK(std::abs(sp.sigma[k] - s.sigma[k]) <= 1e-9 * std::max(1.0, s.sigma[0]));
  }
}

TEST_CASE("embedding svd report covers every view and the stack") {
  const auto raw = small_dataset();
  const TrainedModel m = fresh_model(raw, Aggregation::kConcatenative);
  const SvdReport r = svd_embeddings(m.params);
  REQUIRE(r.entries.size() == raw.features() + 1);
  std::size_t stacked = 0;
  for (std::size_t f = 0; f < raw.features(); ++f) {
    const SvdEntry& e = r.entries[f];
    CHECK(e.name == raw.spec(f).name);
    CHECK(e.cols == 4);
    CHECK(e.rows == (raw.spec(f).kind == FeatureKind::kCategorical ? static_cast<std::size_t>(raw.spec(f).cardinality) : 2));
    CHECK(e.sigma.size() == std::min(e.rows, e.cols));
    CHECK(e.reconstruction_error <= 1e-9 * e.norm);
    stacked += e.rows;
  }
  CHECK(r.entries.back().name == "all_views");
  CHECK(r.entries.back().rows == stacked);
  CHECK(r.to_csv().rfind("matrix,rows,cols,index,sigma,reconstruction_error,norm\nload,2,4,0,", 0) == 0);
}
