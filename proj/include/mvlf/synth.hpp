// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mvlf/calendar.hpp"
#include "mvlf/frame.hpp"

namespace mvlf {

/// Replaces each observed exogenous continuous cell, independently with
/// probability `probability`, by the feature's minimum, maximum or mean
/// over the whole frame (each with chance 1/3). Target and calendar views
/// are never touched. When `replaced` is given it receives a T x F mask of
/// the cells that were drawn for replacement.
TimeSeriesFrame inject_noise(const TimeSeriesFrame& frame, double probability, std::uint64_t seed,
                             std::vector<std::uint8_t>* replaced = nullptr);

struct SynthOptions {
  int days = 365;
  std::uint64_t seed = 0;
  double noise = 0.01;  // relative standard deviation of the load noise
  CivilDate start{2012, 1, 1};
};

/// Deterministic closed-form load given the hour, its temperature and
/// whether the day is a holiday. Noise-free part of synth_generate.
double synth_load(Timestamp t, double temperature, bool holiday);

/// Desk-scale stand-in dataset in the default schema. Load combines a
/// daily profile, a weekday/weekend square wave, a temperature response and
/// multiplicative noise; weather channels carry annual and daily cycles plus
/// persistent anomalies. Holiday and school columns come from the built-in
/// region table.
TimeSeriesFrame synth_generate(const SynthOptions& options);

}  // namespace mvlf
