// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Interpretability: per-view isolation through forced embedding masks,
// embedding weight dumps, and singular value analysis of embeddings.

#pragma once

#include <string>
#include <vector>

#include "mvlf/evaluation.hpp"
#include "mvlf/matrix.hpp"
#include "mvlf/model.hpp"
#include "mvlf/training.hpp"

namespace mvlf {

struct ViewGroup {
  std::string name;
  std::vector<std::string> views;
};

/// long_term, short_term, temperature, weather and holiday panels,
/// restricted to views present in `specs`; empty groups are dropped.
std::vector<ViewGroup> default_view_groups(const std::vector<FeatureSpec>& specs);
/// Raises kConfig unless the groups partition the non-target views.
void validate_view_groups(const std::vector<ViewGroup>& groups, const std::vector<FeatureSpec>& specs);
std::vector<ViewGroup> view_groups_from_json(const std::string& text);

/// Keep-mask with the target and the group's members set.
std::vector<std::uint8_t> group_mask(const ViewGroup& group, const std::vector<FeatureSpec>& specs);

struct IsolationSeries {
  std::string name;  // group name, or "combined" for the unmasked model
  std::vector<double> values;
};

struct IsolationResult {
  std::vector<Timestamp> times;
  std::vector<double> truth;  // NaN where unobserved
  std::vector<IsolationSeries> series;

  std::string to_csv() const;
  std::string manifest_json(const std::string& units) const;
};

/// Tiles `range` with back-to-back rollouts of `horizon` hours and records
/// the forecast of the unmasked model plus one forecast per group in which
/// every other non-target view is masked.
IsolationResult isolate_views(const TrainedModel& model, const TimeSeriesFrame& raw,
                              const std::vector<ViewGroup>& groups, TimeRange range, int horizon);

/// Forecasts of one group alone (a single panel) over the same anchors.
std::vector<double> isolate_view(const TrainedModel& model, const TimeSeriesFrame& raw, const ViewGroup& group,
                                 TimeRange range, int horizon);

struct EmbeddingCell {
  std::string label;            // category value, or "[lo, hi)" bin interval
  std::vector<double> weights;  // the embedding row
  double norm = 0.0;

  bool operator==(const EmbeddingCell&) const = default;
};

struct ViewDump {
  std::string view;
  std::string kind;  // categorical | quantized | affine
  std::vector<EmbeddingCell> cells;

  bool operator==(const ViewDump&) const = default;
};

struct EmbeddingDump {
  std::string method;
  std::vector<ViewDump> views;
  std::vector<std::string> gate_views;
  std::vector<double> gate;

  std::string to_json() const;
  static EmbeddingDump from_json(const std::string& text);
  std::string to_csv() const;
  bool operator==(const EmbeddingDump&) const = default;
};

/// Rows ordered from the lowest category (or bin) to the highest, views in
/// declared order. Quantized bin labels are in raw feature units when a
/// scaler is supplied.
EmbeddingDump dump_embeddings(const ModelParams& params, const Scaler* scaler = nullptr);

struct Svd {
  Matrix u;                    // m x k
  std::vector<double> sigma;   // k = min(m, n), descending, >= 0
  Matrix v;                    // n x k
};

/// Thin SVD by one-sided Jacobi rotations.
Svd svd_jacobi(const Matrix& a);
Matrix svd_reconstruct(const Svd& s);

struct SvdEntry {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> sigma;
  double reconstruction_error = 0.0;  // ||U S V^T - A||_F
  double norm = 0.0;                  // ||A||_F
};

struct SvdReport {
  std::vector<SvdEntry> entries;
  std::string to_csv() const;
};

/// One entry per view embedding matrix (affine views stack W over b) plus
/// "all_views", the row-stack of every view's rows.
SvdReport svd_embeddings(const ModelParams& params);

}  // namespace mvlf
