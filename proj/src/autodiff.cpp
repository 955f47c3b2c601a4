// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvlf/error.hpp"

namespace mvlf {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) {
    fail(ErrorCode::kDimension, "matrix " + std::to_string(r) + "x" + std::to_string(c) + " given " +
                                    std::to_string(data.size()) + " values");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape() const { return std::to_string(rows) + "x" + std::to_string(cols); }

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) fail(ErrorCode::kDimension, "matmul " + a.shape() + " by " + b.shape());
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* crow = &c.data[i * c.cols];
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      const double* brow = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

namespace {

// a * b^T
Matrix multiply_nt(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

// a^T * b
Matrix multiply_tn(const Matrix& a, const Matrix& b) {
  Matrix c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k)
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double aki = a(k, i);
      const double* brow = &b.data[k * b.cols];
      double* crow = &c.data[i * c.cols];
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
  return c;
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  fail(ErrorCode::kDimension, std::string(op) + ": incompatible shapes " + a.shape() + " and " + b.shape());
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), false, {}, nullptr});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::param(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  nodes_.push_back(Node{p.value, Matrix(), true, {}, &p});
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(&p, id);
  return Var(this, id);
}

Var Tape::record(Matrix value, std::span<const Var> parents, BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) needs = needs || nodes_[p.id()].requires_grad;
  nodes_.push_back(Node{std::move(value), Matrix(), needs && backward, needs ? std::move(backward) : BackwardFn{}, nullptr});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

void Tape::accumulate(Var target, const Matrix& delta) {
  Node& n = nodes_[target.id()];
  if (!n.requires_grad) return;
  for (std::size_t i = 0; i < delta.data.size(); ++i) n.grad.data[i] += delta.data[i];
}

void Tape::backward(Var loss) {
  const Matrix& lv = nodes_[loss.id()].value;
  if (lv.rows != 1 || lv.cols != 1) fail(ErrorCode::kDimension, "backward needs a 1x1 loss, got " + lv.shape());
  for (Node& n : nodes_) n.grad = n.requires_grad ? Matrix(n.value.rows, n.value.cols) : Matrix();
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad.data[0] = 1.0;
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward) continue;
    // Copy: the callback may touch other nodes but never this one.
    const Matrix g = n.grad;
    n.backward(*this, g);
  }
  for (const Node& n : nodes_) {
    if (n.param == nullptr) continue;
    Matrix& sink = n.param->grad;
    if (!sink.same_shape(n.value)) sink = Matrix(n.value.rows, n.value.cols);
    for (std::size_t i = 0; i < sink.data.size(); ++i) sink.data[i] += n.grad.data[i];
  }
}

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) shape_error("matmul", a.value(), b.value());
  Matrix out = multiply(a.value(), b.value());
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a.id())) t.accumulate(a, multiply_nt(g, b.value()));
    if (t.requires_grad(b.id())) t.accumulate(b, multiply_tn(a.value(), g));
  });
}

Var matmul_nt(Var a, Var b) {
  if (a.cols() != b.cols()) shape_error("matmul_nt", a.value(), b.value());
  Matrix out = multiply_nt(a.value(), b.value());
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a.id())) t.accumulate(a, multiply(g, b.value()));
    if (t.requires_grad(b.id())) t.accumulate(b, multiply_tn(g, a.value()));
  });
}

Var transpose(Var a) {
  const Var parents[] = {a};
  return a.tape()->record(transpose(a.value()), parents,
                          [a](Tape& t, const Matrix& g) { t.accumulate(a, transpose(g)); });
}

Var add(Var a, Var b) {
  if (!a.value().same_shape(b.value())) shape_error("add", a.value(), b.value());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.value().data[i];
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var add_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) shape_error("add_row", a.value(), row.value());
  Matrix out = a.value();
  const Matrix& r = row.value();
  for (std::size_t i = 0; i < out.rows; ++i)
    for (std::size_t j = 0; j < out.cols; ++j) out(i, j) += r.data[j];
  const Var parents[] = {a, row};
  return a.tape()->record(std::move(out), parents, [a, row](Tape& t, const Matrix& g) {
    t.accumulate(a, g);
    if (t.requires_grad(row.id())) {
      Matrix s(1, g.cols);
      for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = 0; j < g.cols; ++j) s.data[j] += g(i, j);
      t.accumulate(row, s);
    }
  });
}

Var mul(Var a, Var b) {
  if (!a.value().same_shape(b.value())) shape_error("mul", a.value(), b.value());
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.value().data[i];
  const Var parents[] = {a, b};
  return a.tape()->record(std::move(out), parents, [a, b](Tape& t, const Matrix& g) {
    Matrix da = g, db = g;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      da.data[i] *= b.value().data[i];
      db.data[i] *= a.value().data[i];
    }
    t.accumulate(a, da);
    t.accumulate(b, db);
  });
}

Var scale(Var a, double s) {
  Matrix out = a.value();
  for (double& v : out.data) v *= s;
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a, s](Tape& t, const Matrix& g) {
    Matrix d = g;
    for (double& v : d.data) v *= s;
    t.accumulate(a, d);
  });
}

Var shift(Var a, double s) {
  Matrix out = a.value();
  for (double& v : out.data) v += s;
  const Var parents[] = {a};
  return a.tape()->record(std::move(out), parents, [a](Tape& t, const Matrix& g) { t.accumulate(a, g); });
}

Var scale_by(Var a, Var s) {
  if (s.rows() != 1 || s.cols() != 1) shape_error("scale_by", a.value(), s.value());
  const double k = s.scalar();
  Matrix out = a.value();
  for (double& v : out.data) v *= k;
  const Var parents[] = {a, s};
  return a.tape()->record(std::move(out), parents, [a, s](Tape& t, const Matrix& g) {
    const double k = s.scalar();
    if (t.requires_grad(a.id())) {
      Matrix d = g;
      for (double& v : d.data) v *= k;
      t.accumulate(a, d);
    }
    if (t.requires_grad(s.id())) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.data.size(); ++i) acc += g.data[i] * a.value().data[i];
      t.accumulate(s, Matrix(1, 1, acc));
    }
  });
}

Var affine(Var x, Var w, Var b) { return add_row(matmul(x, w), b); }

Var softmax_rows(Var x) {
  Matrix out = x.value();
  for (std::size_t i = 0; i < out.rows; ++i) {
    double* r = &out.data[i * out.cols];
    const double m = *std::max_element(r, r + out.cols);
    double z = 0.0;
    for (std::size_t j = 0; j < out.cols; ++j) z += (r[j] = std::exp(r[j] - m));
    for (std::size_t j = 0; j < out.cols; ++j) r[j] /= z;
  }
  const Var parents[] = {x};
  Tape* tape = x.tape();
  const int self = static_cast<int>(tape->size());
  return tape->record(std::move(out), parents, [x, self](Tape& t, const Matrix& g) {
    const Matrix& y = t.value(self);
    Matrix d(y.rows, y.cols);
    for (std::size_t i = 0; i < y.rows; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols; ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols; ++j) d(i, j) = y(i, j) * (g(i, j) - dot);
    }
    t.accumulate(x, d);
  });
}

Var relu(Var x) {
  Matrix out = x.value();
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  const Var parents[] = {x};
  return x.tape()->record(std::move(out), parents, [x](Tape& t, const Matrix& g) {
    Matrix d = g;
    for (std::size_t i = 0; i < d.data.size(); ++i)
      if (!(x.value().data[i] > 0.0)) d.data[i] = 0.0;
    t.accumulate(x, d);
  });
}

Var layer_norm_rows(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = x.value();
  if (gain.rows() != 1 || gain.cols() != xv.cols) shape_error("layer_norm gain", xv, gain.value());
  if (bias.rows() != 1 || bias.cols() != xv.cols) shape_error("layer_norm bias", xv, bias.value());
  const std::size_t n = xv.cols;
  Matrix xhat(xv.rows, n);
  std::vector<double> inv_std(xv.rows);
  Matrix out(xv.rows, n);
  for (std::size_t i = 0; i < xv.rows; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += xv(i, j);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (xv(i, j) - mu) * (xv(i, j) - mu);
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat(i, j) = (xv(i, j) - mu) * inv_std[i];
      out(i, j) = xhat(i, j) * gain.value().data[j] + bias.value().data[j];
    }
  }
  const Var parents[] = {x, gain, bias};
  return x.tape()->record(std::move(out), parents,
                          [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, const Matrix& g) {
    const std::size_t rows = g.rows, cols = g.cols;
    const Matrix& gv = gain.value();
    if (t.requires_grad(gain.id()) || t.requires_grad(bias.id())) {
      Matrix dg(1, cols), db(1, cols);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
          dg.data[j] += g(i, j) * xhat(i, j);
          db.data[j] += g(i, j);
        }
      t.accumulate(gain, dg);
      t.accumulate(bias, db);
    }
    if (t.requires_grad(x.id())) {
      Matrix dx(rows, cols);
      const double inv_n = 1.0 / static_cast<double>(cols);
      for (std::size_t i = 0; i < rows; ++i) {
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
          const double d = g(i, j) * gv.data[j];
          sum_d += d;
          sum_dx += d * xhat(i, j);
        }
        for (std::size_t j = 0; j < cols; ++j) {
          const double d = g(i, j) * gv.data[j];
          dx(i, j) = inv_std[i] * (d - inv_n * sum_d - xhat(i, j) * inv_n * sum_dx);
        }
      }
      t.accumulate(x, dx);
    }
  });
}

Var dropout(Var x, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) fail(ErrorCode::kArgument, "dropout probability must lie in [0, 1)");
  if (p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  Matrix mask(x.rows(), x.cols());
  for (double& m : mask.data) m = rng.uniform() < p ? 0.0 : keep_scale;
  Matrix out = x.value();
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  const Var parents[] = {x};
  return x.tape()->record(std::move(out), parents, [x, mask = std::move(mask)](Tape& t, const Matrix& g) {
    Matrix d = g;
    for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] *= mask.data[i];
    t.accumulate(x, d);
  });
}

Var embedding_lookup(Var table, std::span<const int> indices) {
  const Matrix& tv = table.value();
  Matrix out(indices.size(), tv.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int k = indices[i];
    if (k < 0 || static_cast<std::size_t>(k) >= tv.rows) {
      fail(ErrorCode::kData, "embedding lookup index " + std::to_string(k) + " outside table of " +
                                 std::to_string(tv.rows) + " rows");
    }
    std::copy_n(&tv.data[static_cast<std::size_t>(k) * tv.cols], tv.cols, &out.data[i * tv.cols]);
  }
  const Var parents[] = {table};
  std::vector<int> idx(indices.begin(), indices.end());
  return table.tape()->record(std::move(out), parents, [table, idx = std::move(idx)](Tape& t, const Matrix& g) {
    const Matrix& tv = table.value();
    Matrix d(tv.rows, tv.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < tv.cols; ++j) d(static_cast<std::size_t>(idx[i]), j) += g(i, j);
    t.accumulate(table, d);
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::kDimension, "concat_cols of nothing");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < v.cols; ++j) out(i, off + j) = v(i, j);
    off += v.cols;
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return parts[0].tape()->record(std::move(out), parts, [ps](Tape& t, const Matrix& g) {
    std::size_t off = 0;
    for (const Var& p : ps) {
      const std::size_t c = p.cols();
      if (t.requires_grad(p.id())) {
        Matrix d(g.rows, c);
        for (std::size_t i = 0; i < g.rows; ++i)
          for (std::size_t j = 0; j < c; ++j) d(i, j) = g(i, off + j);
        t.accumulate(p, d);
      }
      off += c;
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::kDimension, "concat_rows of nothing");
  const std::size_t cols = parts[0].cols();
  std::vector<double> data;
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) shape_error("concat_rows", parts[0].value(), p.value());
    data.insert(data.end(), p.value().data.begin(), p.value().data.end());
    rows += p.rows();
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return parts[0].tape()->record(Matrix(rows, cols, std::move(data)), parts, [ps](Tape& t, const Matrix& g) {
    std::size_t off = 0;
    for (const Var& p : ps) {
      const std::size_t n = p.value().size();
      if (t.requires_grad(p.id())) {
        Matrix d(p.rows(), p.cols(), std::vector<double>(g.data.begin() + off, g.data.begin() + off + n));
        t.accumulate(p, d);
      }
      off += n;
    }
  });
}

Var sum_terms(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::kDimension, "sum_terms of nothing");
  Matrix out = parts[0].value();
  for (std::size_t k = 1; k < parts.size(); ++k) {
    if (!parts[k].value().same_shape(out)) shape_error("sum_terms", out, parts[k].value());
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += parts[k].value().data[i];
  }
  std::vector<Var> ps(parts.begin(), parts.end());
  return parts[0].tape()->record(std::move(out), parts, [ps](Tape& t, const Matrix& g) {
    for (const Var& p : ps) t.accumulate(p, g);
  });
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
  const Matrix& v = x.value();
  if (begin + count > v.rows) {
    fail(ErrorCode::kDimension, "slice_rows [" + std::to_string(begin) + ", +" + std::to_string(count) +
                                    ") of " + v.shape());
  }
  Matrix out(count, v.cols,
             std::vector<double>(v.data.begin() + begin * v.cols, v.data.begin() + (begin + count) * v.cols));
  const Var parents[] = {x};
  return x.tape()->record(std::move(out), parents, [x, begin](Tape& t, const Matrix& g) {
    Matrix d(x.rows(), x.cols());
    std::copy(g.data.begin(), g.data.end(), d.data.begin() + begin * d.cols);
    t.accumulate(x, d);
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  const Matrix& v = x.value();
  if (begin + count > v.cols) {
    fail(ErrorCode::kDimension, "slice_cols [" + std::to_string(begin) + ", +" + std::to_string(count) +
                                    ") of " + v.shape());
  }
  Matrix out(v.rows, count);
  for (std::size_t i = 0; i < v.rows; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = v(i, begin + j);
  const Var parents[] = {x};
  return x.tape()->record(std::move(out), parents, [x, begin](Tape& t, const Matrix& g) {
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < g.rows; ++i)
      for (std::size_t j = 0; j < g.cols; ++j) d(i, begin + j) = g(i, j);
    t.accumulate(x, d);
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data) s += v;
  const Var parents[] = {x};
  return x.tape()->record(Matrix(1, 1, s), parents, [x](Tape& t, const Matrix& g) {
    t.accumulate(x, Matrix(x.rows(), x.cols(), g.data[0]));
  });
}

Var mean(Var x) {
  const double n = static_cast<double>(x.value().size());
  if (n == 0) fail(ErrorCode::kDimension, "mean of an empty matrix");
  return scale(sum(x), 1.0 / n);
}

Var mape_loss(Var prediction, std::span<const double> truth) {
  const Matrix& p = prediction.value();
  if (p.size() != truth.size() || truth.empty()) {
    fail(ErrorCode::kDimension, "mape_loss: prediction " + p.shape() + " vs " + std::to_string(truth.size()) + " targets");
  }
  const double n = static_cast<double>(truth.size());
  double acc = 0.0;
  std::vector<double> y(truth.begin(), truth.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(std::abs(y[i]) > 1e-6)) fail(ErrorCode::kData, "MAPE undefined: |y| <= 1e-6 at index " + std::to_string(i));
    acc += std::abs(y[i] - p.data[i]) / std::abs(y[i]);
  }
  const Var parents[] = {prediction};
  return prediction.tape()->record(Matrix(1, 1, 100.0 / n * acc), parents,
                                   [prediction, y = std::move(y), n](Tape& t, const Matrix& g) {
    const Matrix& p = prediction.value();
    Matrix d(p.rows, p.cols);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double diff = p.data[i] - y[i];
      const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      d.data[i] = g.data[0] * 100.0 / n * sgn / std::abs(y[i]);
    }
    t.accumulate(prediction, d);
  });
}

Var mse_loss(Var prediction, std::span<const double> truth) {
  const Matrix& p = prediction.value();
  if (p.size() != truth.size() || truth.empty()) {
    fail(ErrorCode::kDimension, "mse_loss: prediction " + p.shape() + " vs " + std::to_string(truth.size()) + " targets");
  }
  const double n = static_cast<double>(truth.size());
  double acc = 0.0;
  std::vector<double> y(truth.begin(), truth.end());
  for (std::size_t i = 0; i < y.size(); ++i) acc += (p.data[i] - y[i]) * (p.data[i] - y[i]);
  const Var parents[] = {prediction};
  return prediction.tape()->record(Matrix(1, 1, acc / n), parents,
                                   [prediction, y = std::move(y), n](Tape& t, const Matrix& g) {
    const Matrix& p = prediction.value();
    Matrix d(p.rows, p.cols);
    for (std::size_t i = 0; i < y.size(); ++i) d.data[i] = g.data[0] * 2.0 * (p.data[i] - y[i]) / n;
    t.accumulate(prediction, d);
  });
}

GradCheckResult finite_diff_check(const std::function<Var(Tape&)>& loss, std::span<Parameter* const> params,
                                  double eps) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(loss(tape));
  }
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) {
    analytic.push_back(p->grad);
    p->zero_grad();
  }
  auto eval = [&loss] {
    Tape tape;
    return loss(tape).scalar();
  };
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    for (std::size_t i = 0; i < p.value.data.size(); ++i) {
      const double saved = p.value.data[i];
      p.value.data[i] = saved + eps;
      const double up = eval();
      p.value.data[i] = saved - eps;
      const double down = eval();
      p.value.data[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k].data[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      ++result.entries_checked;
      if (rel > result.max_relative_error || result.worst_parameter.empty()) {
        if (rel >= result.max_relative_error) {
          result.max_relative_error = rel;
          result.worst_parameter = p.name;
          result.worst_index = i;
          result.analytic = a;
          result.numeric = numeric;
        }
      }
    }
  }
  return result;
}

}  // namespace mvlf
