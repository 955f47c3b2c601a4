// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Define-by-run reverse-mode differentiation over dense double matrices.
//
// A Tape records every operation of one forward pass in creation order,
// which is also a valid topological order, so backward() is a single
// reverse sweep. Parameters live outside the tape; a tape copies their
// values on first use and, after backward(), adds the accumulated
// gradient into Parameter::grad.
//
//   Tape tape;
//   Var w = tape.param(weight);
//   Var loss = mean(relu(matmul(tape.constant(x), w)));
//   tape.backward(loss);   // weight.grad now holds d loss / d weight

#pragma once

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvlf/matrix.hpp"
#include "mvlf/rng.hpp"

namespace mvlf {

/// A learnable array. `grad` is bookkeeping written by Tape::backward and
/// is mutable so that read-only model views can still be differentiated.
struct Parameter {
  std::string name;
  Matrix value;
  mutable Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(value.rows, value.cols) {}
  void zero_grad() const { grad = Matrix(value.rows, value.cols); }
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  const Matrix& grad() const;
  std::size_t rows() const { return value().rows; }
  std::size_t cols() const { return value().cols; }
  double scalar() const { return value().data.at(0); }

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  /// Receives the output gradient and pushes contributions to parents via
  /// Tape::accumulate.
  using BackwardFn = std::function<void(Tape&, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var param(const Parameter& p);

  /// Records an operation. `backward` may be empty for non-differentiable
  /// results; it is skipped when no parent requires a gradient.
  Var record(Matrix value, std::span<const Var> parents, BackwardFn backward);

  /// Seeds d loss / d loss = 1 and sweeps backward. Internal gradients are
  /// reset at the start of each call; Parameter::grad accumulates across
  /// calls until the caller zeroes it.
  void backward(Var loss);

  const Matrix& value(int id) const { return nodes_[id].value; }
  const Matrix& grad(int id) const { return nodes_[id].grad; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  void accumulate(Var target, const Matrix& delta);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    BackwardFn backward;
    const Parameter* param = nullptr;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

// Primitive set. Every function checks shapes and throws
// Error(ErrorCode::kDimension) naming both operands on mismatch.
Var matmul(Var a, Var b);
Var matmul_nt(Var a, Var b);  // a * b^T
Var transpose(Var a);
Var add(Var a, Var b);
Var add_row(Var a, Var row);  // broadcast a 1 x cols row over every row of a
Var mul(Var a, Var b);        // elementwise
Var scale(Var a, double s);
Var shift(Var a, double s);
Var scale_by(Var a, Var s);   // s is 1 x 1
Var affine(Var x, Var w, Var b);
Var softmax_rows(Var x);
Var relu(Var x);
Var layer_norm_rows(Var x, Var gain, Var bias, double eps = 1e-5);
/// Inverted dropout: kept entries scaled by 1 / (1 - p). p = 0 is identity.
Var dropout(Var x, double p, Rng& rng);
Var embedding_lookup(Var table, std::span<const int> indices);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var sum_terms(std::span<const Var> parts);
Var slice_rows(Var x, std::size_t begin, std::size_t count);
Var slice_cols(Var x, std::size_t begin, std::size_t count);
Var mean(Var x);  // 1 x 1
Var sum(Var x);   // 1 x 1

/// 100/N * sum |y - yhat| / |y| over all entries. Throws kData when some
/// |y| <= 1e-6.
Var mape_loss(Var prediction, std::span<const double> truth);
Var mse_loss(Var prediction, std::span<const double> truth);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// Compares reverse-mode gradients of `loss` against central differences
/// (f(x + eps) - f(x - eps)) / 2 eps for every entry of every parameter.
/// Relative error is |a - n| / max(|a|, |n|, 1e-6). `loss` must be
/// deterministic. Parameter gradients are left zeroed.
GradCheckResult finite_diff_check(const std::function<Var(Tape&)>& loss,
                                  std::span<Parameter* const> params, double eps);

}  // namespace mvlf
