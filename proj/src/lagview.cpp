// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/lagview.hpp"

#include <algorithm>

#include "mvlf/error.hpp"

namespace mvlf {

LagSet::LagSet(std::vector<int> lags) : lags_(std::move(lags)) {
  if (lags_.empty()) fail(ErrorCode::kArgument, "lag set is empty");
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    if (lags_[i] < 1) fail(ErrorCode::kArgument, "lags must be at least one hour");
    if (i > 0 && lags_[i] >= lags_[i - 1]) fail(ErrorCode::kArgument, "lags must be strictly decreasing (oldest first)");
  }
}

LagSet LagSet::defaults() { return LagSet({8760, 168, 24, 12, 6, 5, 4, 3, 2, 1}); }

LagSet LagSet::capped(int max_lag) const {
  std::vector<int> kept;
  std::copy_if(lags_.begin(), lags_.end(), std::back_inserter(kept), [max_lag](int l) { return l <= max_lag; });
  if (kept.empty()) fail(ErrorCode::kArgument, "max lag " + std::to_string(max_lag) + " removes every lag");
  return LagSet(std::move(kept));
}

LagSet effective_lagset(std::size_t frame_rows, const LagSet& requested, std::optional<int> max_lag) {
  if (max_lag) return requested.capped(*max_lag);
  if (frame_rows < static_cast<std::size_t>(requested.max()) + kOneMonthHours && requested.max() > kRemLagCap) {
    return requested.capped(kRemLagCap);
  }
  return requested;
}

std::vector<std::size_t> valid_indices(const TimeSeriesFrame& frame, const LagSet& lags, int horizon) {
  const std::size_t n = frame.rows();
  // prefix[i] = number of incomplete rows among 0..i-1
  std::vector<std::size_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (frame.row_complete(i) ? 0 : 1);
  auto complete = [&](std::size_t r) { return prefix[r + 1] == prefix[r]; };

  std::vector<std::size_t> out;
  const std::size_t first = static_cast<std::size_t>(lags.max());
  const std::size_t h = static_cast<std::size_t>(std::max(horizon, 0));
  for (std::size_t t = first; t + h < n; ++t) {
    bool ok = true;
    for (int l : lags.lags()) {
      if (!complete(t - static_cast<std::size_t>(l))) {
        ok = false;
        break;
      }
    }
    if (ok && h > 0) ok = prefix[t + h + 1] == prefix[t + 1];
    if (ok) out.push_back(t);
  }
  return out;
}

std::vector<Timestamp> valid_timestamps(const TimeSeriesFrame& frame, const LagSet& lags, int horizon) {
  const auto idx = valid_indices(frame, lags, horizon);
  if (idx.empty()) {
    fail(ErrorCode::kData, "frame too short: no valid anchor (needs at least " +
                               std::to_string(lags.max() + std::max(horizon, 0) + 1) + " complete hourly rows, has " +
                               std::to_string(frame.rows()) + ")");
  }
  std::vector<Timestamp> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(frame.timestamp(i));
  return out;
}

ScaledInput build_input(const TimeSeriesFrame& frame, Timestamp anchor, const LagSet& lags) {
  const std::size_t nf = frame.features();
  ScaledInput in{Matrix(lags.size(), nf), anchor, lags, frame.specs()};
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const auto row = frame.row_of(anchor - lags.lags()[j]);
    if (!row || !frame.row_complete(*row)) {
      fail(ErrorCode::kArgument, "anchor " + anchor.iso() + " invalid: lag " + std::to_string(lags.lags()[j]) +
                                     "h row " + (row ? "is incomplete" : "is outside the frame"));
    }
    const auto src = frame.row(*row);
    std::copy(src.begin(), src.end(), in.matrix.data.begin() + j * nf);
  }
  return in;
}

std::vector<TrainingExample> build_batch(const TimeSeriesFrame& frame, const std::vector<Timestamp>& anchors,
                                         const LagSet& lags, int horizon) {
  std::vector<TrainingExample> out;
  out.reserve(anchors.size());
  const std::size_t target = frame.target_index();
  std::vector<std::string> bad;
  for (const Timestamp& t : anchors) {
    const auto row = frame.row_of(t);
    bool ok = row.has_value();
    std::vector<double> y;
    if (ok) {
      for (int h = 1; h <= horizon && ok; ++h) {
        const std::size_t r = *row + static_cast<std::size_t>(h);
        ok = r < frame.rows() && frame.row_complete(r);
        if (ok) y.push_back(frame.value(r, target));
      }
    }
    if (ok) {
      try {
        out.push_back(TrainingExample{build_input(frame, t, lags), std::move(y)});
        continue;
      } catch (const Error&) {
      }
    }
    bad.push_back(t.iso());
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad.size() && i < 10; ++i) list += (i ? ", " : "") + bad[i];
    if (bad.size() > 10) list += ", ...";
    fail(ErrorCode::kArgument, std::to_string(bad.size()) + " invalid anchor(s): " + list);
  }
  return out;
}

}  // namespace mvlf
