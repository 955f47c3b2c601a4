// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <functional>

#include <cmath>
#include <vector>

#include "mvlf/autodiff.hpp"
#include "mvlf/error.hpp"

using namespace mvlf;

namespace {

Parameter random_param(const std::string& name, std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                       double hi = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(lo, hi);
  return Parameter(name, m);
}

double check(const std::function<Var(Tape&)>& f, std::vector<Parameter*> ps) {
  const GradCheckResult r = finite_diff_check(f, ps, 1e-6);
  CAPTURE(r.worst_parameter);
  CAPTURE(r.worst_index);
  CAPTURE(r.analytic);
  CAPTURE(r.numeric);
  return r.max_relative_error;
}

}  // namespace

TEST_CASE("matmul forward matches hand computation") {
  Tape t;
  Var a = t.constant(Matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  Var b = t.constant(Matrix(3, 2, {7, 8, 9, 10, 11, 12}));
  CHECK(matmul(a, b).value() == Matrix(2, 2, {58, 64, 139, 154}));
  CHECK(matmul_nt(a, a).value() == Matrix(2, 2, {14, 32, 32, 77}));
  CHECK(transpose(a).value() == Matrix(3, 2, {1, 4, 2, 5, 3, 6}));
}

TEST_CASE("shape mismatches raise dimension errors") {
  Tape t;
  Var a = t.constant(Matrix(2, 3));
  Var b = t.constant(Matrix(2, 3));
  try {
    matmul(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
  CHECK_THROWS_AS(add(a, t.constant(Matrix(3, 2))), Error);
}

TEST_CASE("gradients of the primitive set match central differences") {
  Rng rng(11);
  Parameter a = random_param("a", 3, 4, rng);
  Parameter b = random_param("b", 4, 2, rng);
  Parameter row = random_param("row", 1, 4, rng);
  Parameter g = random_param("g", 1, 4, rng, 0.5, 1.5);
  Parameter s = random_param("s", 1, 1, rng, 0.5, 1.5);

  CHECK(check([&](Tape& t) { return sum(matmul(t.param(a), t.param(b))); }, {&a, &b}) < 1e-6);
  CHECK(check([&](Tape& t) { return mean(mul(matmul_nt(t.param(a), t.param(a)), t.constant(Matrix(3, 3, 0.3)))); },
              {&a}) < 1e-6);
  CHECK(check([&](Tape& t) { return sum(mul(softmax_rows(t.param(a)), t.constant(Matrix(3, 4, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12})))); },
              {&a}) < 1e-6);
  CHECK(check([&](Tape& t) {
          Var y = layer_norm_rows(t.param(a), t.param(g), t.param(row));
          return sum(mul(y, t.constant(Matrix(3, 4, {1, -2, 3, 0.5, 2, 1, -1, 0, 4, 2, 1, 3}))));
        },
              {&a, &g, &row}) < 1e-6);
  CHECK(check([&](Tape& t) { return sum(relu(add_row(t.param(a), t.param(row)))); }, {&a, &row}) < 1e-6);
  CHECK(check([&](Tape& t) { return sum(scale_by(shift(scale(t.param(a), 2.0), 1.0), t.param(s))); }, {&a, &s}) < 1e-6);
  CHECK(check([&](Tape& t) {
          Var parts[] = {slice_cols(t.param(a), 1, 2), slice_rows(t.param(b), 0, 3)};
          Var c = concat_cols(std::span<const Var>(parts, 2));
          return sum(mul(c, c));
        },
              {&a, &b}) < 1e-6);
  CHECK(check([&](Tape& t) {
          Var parts[] = {t.param(row), t.param(g), t.param(row)};
          Var c = concat_rows(std::span<const Var>(parts, 3));
          Var terms[] = {c, c, slice_rows(t.param(a), 0, 3)};
          return sum(mul(sum_terms(std::span<const Var>(terms, 3)), c));
        },
              {&row, &g, &a}) < 1e-6);
  CHECK(check([&](Tape& t) {
          const int idx[] = {2, 0, 2, 1};
          Var e = embedding_lookup(t.param(a), idx);
          return sum(mul(e, e));
        },
              {&a}) < 1e-6);
  CHECK(check([&](Tape& t) { return sum(affine(t.param(a), t.param(b), slice_cols(t.param(row), 0, 2))); },
              {&a, &b, &row}) < 1e-6);
  CHECK(check([&](Tape& t) { return sum(transpose(mul(t.param(a), t.param(a)))); }, {&a}) < 1e-6);
}

TEST_CASE("loss gradients match finite differences to 1e-8") {
  // Both losses are piecewise polynomial of degree <= 2 in the prediction, so a
  // wide central step is exact up to rounding.
  Rng rng(2);
  Parameter p = random_param("p", 2, 3, rng, 50.0, 150.0);
  const std::vector<double> y{100, 120, 90, 80, 130, 110};
  const std::vector<Parameter*> ps{&p};
  CHECK(finite_diff_check([&](Tape& t) { return mape_loss(t.param(p), y); }, ps, 1e-3).max_relative_error < 1e-8);
  CHECK(finite_diff_check([&](Tape& t) { return mse_loss(t.param(p), y); }, ps, 1e-3).max_relative_error < 1e-8);
}

TEST_CASE("mape loss value and guard") {
  Tape t;
  Var p = t.constant(Matrix(1, 2, {110, 180}));
  const std::vector<double> y{100, 200};
  CHECK(mape_loss(p, y).scalar() == doctest::Approx(10.0).epsilon(1e-15));
  const std::vector<double> zero{100, 0};
  try {
    mape_loss(p, zero);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
}

TEST_CASE("dropout semantics") {
  Rng rng(9);
  Tape t;
  Var x = t.constant(Matrix(4, 5, 2.0));
  CHECK(dropout(x, 0.0, rng).value() == x.value());
  Var d = dropout(x, 0.5, rng);
  for (double v : d.value().data) CHECK((v == 0.0 || v == 4.0));
  CHECK_THROWS_AS(dropout(x, 1.0, rng), Error);
  CHECK_THROWS_AS(dropout(x, -0.1, rng), Error);
}

TEST_CASE("parameter gradients accumulate across backward calls") {
  Parameter w("w", Matrix(1, 2, {1.0, 2.0}));
  for (int k = 0; k < 2; ++k) {
    Tape t;
    t.backward(sum(mul(t.param(w), t.param(w))));
  }
  CHECK(w.grad == Matrix(1, 2, {4.0, 8.0}));
  w.zero_grad();
  CHECK(w.grad == Matrix(1, 2));
}

TEST_CASE("embedding lookup rejects out-of-range indices") {
  Tape t;
  Parameter table("t", Matrix(3, 2));
  const int idx[] = {3};
  try {
    embedding_lookup(t.param(table), idx);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
  }
}

TEST_CASE("backward requires a scalar loss") {
  Tape t;
  Var x = t.constant(Matrix(2, 2, 1.0));
  CHECK_THROWS_AS(t.backward(x), Error);
}

TEST_CASE("every primitive passes the gradient check on random shapes") {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng.below(4), c = 1 + rng.below(4), k = 1 + rng.below(4);
    Parameter a = random_param("a", r, c, rng);
    Parameter b = random_param("b", c, k, rng);
    Parameter a2 = random_param("a2", r, c, rng);
    Parameter row = random_param("row", 1, c, rng);
    Parameter g = random_param("g", 1, c, rng, 0.5, 1.5);
    Parameter s = random_param("s", 1, 1, rng, 0.5, 1.5);
    Parameter table = random_param("table", 5, c, rng);
    Parameter bk = random_param("bk", 1, k, rng);
    // Two-column layer norm saturates at +-1 and leaves only roundoff-sized gradients.
    const std::size_t wc = 3 + rng.below(4);
    Parameter wide = random_param("wide", r, wc, rng);
    Parameter wide_g = random_param("wide_g", 1, wc, rng, 0.5, 1.5);
    Parameter wide_b = random_param("wide_b", 1, wc, rng);
    Matrix wide_w(r, wc);
    for (double& v : wide_w.data) v = rng.uniform(-2, 2);
    Matrix w(r, c);
    for (double& v : w.data) v = rng.uniform(-2, 2);
    Matrix wk(r, k);
    for (double& v : wk.data) v = rng.uniform(-2, 2);
    std::vector<int> idx(r);
    for (int& i : idx) i = static_cast<int>(rng.below(5));
    const std::size_t cb = rng.below(c), cn = 1 + rng.below(c - cb);
    const std::size_t rb = rng.below(r), rn = 1 + rng.below(r - rb);

    auto weighted = [&](Tape& t, Var v) { return sum(mul(v, t.constant(w))); };
    const std::vector<std::pair<std::function<Var(Tape&)>, std::vector<Parameter*>>> cases = {
        {[&](Tape& t) { return sum(mul(matmul(t.param(a), t.param(b)), t.constant(wk))); }, {&a, &b}},
        {[&](Tape& t) { return sum(matmul_nt(t.param(a), t.param(a2))); }, {&a, &a2}},
        {[&](Tape& t) { return sum(mul(transpose(transpose(t.param(a))), t.constant(w))); }, {&a}},
        {[&](Tape& t) { return weighted(t, add(t.param(a), t.param(a2))); }, {&a, &a2}},
        {[&](Tape& t) { return weighted(t, add_row(t.param(a), t.param(row))); }, {&a, &row}},
        {[&](Tape& t) { return weighted(t, mul(t.param(a), t.param(a2))); }, {&a, &a2}},
        {[&](Tape& t) { return weighted(t, shift(scale(t.param(a), -1.7), 0.3)); }, {&a}},
        {[&](Tape& t) { return weighted(t, scale_by(t.param(a), t.param(s))); }, {&a, &s}},
        {[&](Tape& t) { return weighted(t, softmax_rows(t.param(a))); }, {&a}},
        {[&](Tape& t) { return weighted(t, relu(t.param(a))); }, {&a}},
        {[&](Tape& t) {
           Var y = layer_norm_rows(t.param(wide), t.param(wide_g), t.param(wide_b));
           return sum(mul(y, t.constant(wide_w)));
         },
         {&wide, &wide_g, &wide_b}},
        {[&](Tape& t) { return weighted(t, embedding_lookup(t.param(table), idx)); }, {&table}},
        {[&](Tape& t) {
           Var parts[] = {t.param(a), t.param(a2)};
           Var cat = concat_cols(std::span<const Var>(parts, 2));
           return sum(mul(cat, cat));
         },
         {&a, &a2}},
        {[&](Tape& t) {
           Var parts[] = {t.param(a), t.param(row)};
           Var cat = concat_rows(std::span<const Var>(parts, 2));
           return sum(mul(cat, cat));
         },
         {&a, &row}},
        {[&](Tape& t) {
           Var parts[] = {t.param(a), t.param(a2), t.param(a)};
           return weighted(t, sum_terms(std::span<const Var>(parts, 3)));
         },
         {&a, &a2}},
        {[&](Tape& t) { return sum(mul(slice_rows(t.param(a), rb, rn), slice_rows(t.param(a2), rb, rn))); }, {&a, &a2}},
        {[&](Tape& t) { return sum(mul(slice_cols(t.param(a), cb, cn), slice_cols(t.param(a2), cb, cn))); }, {&a, &a2}},
        {[&](Tape& t) { return mean(mul(t.param(a), t.param(a2))); }, {&a, &a2}},
        {[&](Tape& t) { return sum(mul(affine(t.param(a), t.param(b), t.param(bk)), t.constant(wk))); }, {&a, &b, &bk}},
    };
    for (std::size_t k = 0; k < cases.size(); ++k) {
      CAPTURE(trial);
      CAPTURE(k);
      const double e = check(cases[k].first, cases[k].second);
      worst = std::max(worst, e);
      REQUIRE(e < 1e-4);
    }
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("softmax rows are positive and sum to one") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(3, 1 + rng.below(8));
    for (double& v : x.data) v = rng.uniform(-30, 30);
    Tape t;
    const Matrix y = softmax_rows(t.constant(x)).value();
    for (std::size_t i = 0; i < y.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < y.cols; ++j) {
        CHECK(y(i, j) > 0.0);
        CHECK(y(i, j) <= 1.0);
        s += y(i, j);
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("quadratic in one weight is exact") {
  Parameter w("w", Matrix(1, 1, {0.7}));
  const GradCheckResult r =
      finite_diff_check([&](Tape& t) { return sum(mul(t.param(w), t.param(w))); }, std::vector<Parameter*>{&w}, 1e-5);
  CHECK(r.max_relative_error < 1e-9);
  CHECK(r.entries_checked == 1);
}

TEST_CASE("a corrupted gradient rule is detected") {
  Rng rng(3);
  Parameter a = random_param("a", 3, 3, rng);
  auto doubled_wrong = [](Var x) {
    Tape& t = *x.tape();
    Matrix v = x.value();
    for (double& e : v.data) e *= e;
    Var parents[] = {x};
    return t.record(std::move(v), parents, [x](Tape& tp, const Matrix& g) {
      Matrix d = g;
      for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] *= 3.0 * x.value().data[i];  // should be 2x
      tp.accumulate(x, d);
    });
  };
  const double e = check([&](Tape& t) { return sum(doubled_wrong(t.param(a))); }, {&a});
  CHECK(e > 1e-2);
}

TEST_CASE("random three-layer composition matches finite differences") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    Parameter w1 = random_param("w1", 4, 6, rng), b1 = random_param("b1", 1, 6, rng);
    Parameter w2 = random_param("w2", 6, 5, rng), b2 = random_param("b2", 1, 5, rng);
    Parameter w3 = random_param("w3", 5, 2, rng);
    Parameter g = random_param("g", 1, 5, rng, 0.5, 1.5), bb = random_param("bb", 1, 5, rng);
    Matrix x(3, 4);
    for (double& v : x.data) v = rng.normal();
    const std::vector<double> y{1.0, 2.0, 1.5, 0.5, 2.5, 1.2};
    const double e = check(
        [&](Tape& t) {
          Var h = relu(affine(t.constant(x), t.param(w1), t.param(b1)));
          Var z = layer_norm_rows(affine(h, t.param(w2), t.param(b2)), t.param(g), t.param(bb));
          Var att = matmul(softmax_rows(matmul_nt(z, z)), z);
          return mse_loss(matmul(att, t.param(w3)), y);
        },
        {&w1, &b1, &w2, &b2, &w3, &g, &bb});
    CHECK(e < 1e-4);
  }
}
