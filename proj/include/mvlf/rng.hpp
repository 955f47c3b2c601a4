// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace mvlf {

/// Counter-based SplitMix64 stream. The n-th draw depends only on
/// (seed, n), so sequences are identical on every platform and a stream
/// can be reconstructed from its two fields.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

  std::uint64_t next_u64();
  double uniform();  // [0, 1), 53-bit resolution
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // Box-Muller; consumes two draws
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream; does not advance this one.
  Rng split(std::string_view name) const;
  Rng split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace mvlf
