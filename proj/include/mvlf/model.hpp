// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

// Multi-view encoder-decoder forecaster.
//
// Every feature column of the lag matrix is a view with its own embedding:
// categorical views use a lookup table, continuous views an affine map, and
// under the single-value method continuous views are quantized into bins
// and looked up as well (d = 1). Each embedding is weighted by a learnable
// per-view gate, optionally masked (embedding dropout, never the target),
// then aggregated by sum or concatenation. A post-norm transformer encoder
// contextualizes the aggregate into H; each decoder layer cross-attends
// with queries and keys from H and values from U, where U is the raw lag
// matrix for the first layer and the previous decoder output afterwards.
// A linear head maps the most recent lag row to the horizon.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvlf/autodiff.hpp"
#include "mvlf/frame.hpp"
#include "mvlf/lagview.hpp"
#include "mvlf/rng.hpp"

namespace mvlf {

enum class Aggregation { kAdditive, kConcatenative, kSvd };
enum class HeadReduction { kLastRow, kMeanPool };

const char* to_string(Aggregation a);
Aggregation parse_aggregation(const std::string& name);

struct ModelConfig {
  Aggregation method = Aggregation::kSvd;
  int d = 1;
  int heads = 2;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int ffn_width = 64;
  double transformer_dropout = 0.1;
  double embedding_dropout = 0.2;
  int horizon = 24;  // tau: hours emitted per forward call
  int bins = 16;     // quantizer bins for continuous views under svd
  HeadReduction reduction = HeadReduction::kLastRow;

  /// Table defaults for `method`: d = 32 for additive/concatenative, 1 for svd.
  static ModelConfig defaults(Aggregation method);

  /// D = d for additive, d * F otherwise.
  int width(std::size_t views) const;
  /// Raises kConfig on an inconsistent configuration.
  void validate(std::size_t views) const;

  bool operator==(const ModelConfig&) const = default;
};

std::string model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const std::string& text);

/// Equal-width bins over a fitted [lo, hi]; values outside clamp to the
/// edge bins.
struct Quantizer {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 0;  // 0 = not fitted

  bool fitted() const { return bins > 0; }
  int bin(double x) const;
  double center(int b) const;
  double edge(int b) const;  // lower edge of bin b; edge(bins) = hi
};

struct DropoutDirective {
  enum class Mode { kTrainRandom, kEval, kForced };

  Mode mode = Mode::kEval;
  double probability = 0.0;       // drop probability for kTrainRandom
  std::vector<std::uint8_t> keep;  // per view, 1 = keep; kForced only

  static DropoutDirective train(double p) { return {Mode::kTrainRandom, p, {}}; }
  static DropoutDirective eval() { return {Mode::kEval, 0.0, {}}; }
  /// The target entry is forced to 1 whatever `keep` says.
  static DropoutDirective forced(std::vector<std::uint8_t> keep) { return {Mode::kForced, 0.0, std::move(keep)}; }

  bool training() const { return mode == Mode::kTrainRandom; }
};

struct ParamCount {
  std::size_t embeddings = 0;
  std::size_t gates = 0;
  std::size_t encoder = 0;
  std::size_t decoder = 0;
  std::size_t head = 0;
  std::size_t total() const { return embeddings + gates + encoder + decoder + head; }
};

/// Closed-form count of learnable scalars.
ParamCount param_count(const ModelConfig& config, const std::vector<FeatureSpec>& specs);

struct AttentionParams {
  std::size_t wq, wk, wv, wo, bo;
};
struct BlockParams {
  AttentionParams attn;
  std::size_t ln1_g, ln1_b, ffn_w1, ffn_b1, ffn_w2, ffn_b2, ln2_g, ln2_b;
};
struct ViewParams {
  enum class Kind { kTable, kAffine, kQuantized };
  Kind kind = Kind::kTable;
  std::size_t table = 0;  // kTable, kQuantized
  std::size_t weight = 0;  // kAffine: 1 x d
  std::size_t bias = 0;    // kAffine: 1 x d
};

/// All learnable values plus the fitted quantizers, in declaration order.
class ModelParams {
 public:
  /// Uniform(+-sqrt(1/fan_in)) weights, zero biases, unit gates and norm
  /// gains. Lookup tables use fan_in = 1.
  static ModelParams init(const ModelConfig& config, std::vector<FeatureSpec> specs, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }
  std::size_t views() const { return specs_.size(); }
  int width() const { return config_.width(specs_.size()); }

  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  std::size_t scalar_count() const;
  void zero_grad() const;

  const std::vector<ViewParams>& view_params() const { return views_; }
  const std::vector<BlockParams>& encoder_blocks() const { return encoder_; }
  const std::vector<BlockParams>& decoder_blocks() const { return decoder_; }
  std::size_t gate() const { return gate_; }
  std::size_t head_weight() const { return head_w_; }
  std::size_t head_bias() const { return head_b_; }

  /// Fits one quantizer per continuous view over observed rows of `range`
  /// in `frame` (which must already be in model input units). No-op for
  /// methods other than svd.
  void fit_quantizers(const TimeSeriesFrame& frame, TimeRange range);
  const std::vector<Quantizer>& quantizers() const { return quantizers_; }
  void set_quantizers(std::vector<Quantizer> q) { quantizers_ = std::move(q); }

 private:
  std::size_t add(std::string name, Matrix value);

  ModelConfig config_;
  std::vector<FeatureSpec> specs_;
  std::vector<Parameter> params_;
  std::vector<ViewParams> views_;
  std::vector<BlockParams> encoder_;
  std::vector<BlockParams> decoder_;
  std::vector<Quantizer> quantizers_;
  std::size_t gate_ = 0, head_w_ = 0, head_b_ = 0;
};

/// Optional side channel for tests and analysis.
struct ForwardTrace {
  std::vector<Matrix> attention_maps;   // every head of every layer
  std::vector<Matrix> decoder_values;   // U * W_V per decoder layer
  std::vector<Matrix> decoder_inputs;   // U per decoder layer
  std::vector<std::uint8_t> view_mask;  // mask actually applied
  Matrix aggregated;                    // Z~
  Matrix encoded;                       // H
};

/// softmax(Q K^T / sqrt(k)) V for one head.
Var attention(Var q, Var k, Var v, ForwardTrace* trace = nullptr);

/// Per-view embeddings, gated, masked and aggregated: |L| x D.
Var embed_views(Tape& tape, const ScaledInput& input, const ModelParams& params, const DropoutDirective& directive,
                Rng& rng, ForwardTrace* trace = nullptr);
Var encode(Var aggregated, const ModelParams& params, bool training, Rng& rng, ForwardTrace* trace = nullptr);
Var decode(Var encoded, Var raw_input, const ModelParams& params, bool training, Rng& rng,
           ForwardTrace* trace = nullptr);
/// 1 x tau forecast from the decoder output.
Var head(Var decoded, const ModelParams& params);

/// embed_views -> encode -> decode -> head. Output is in model input units
/// of the target view.
Var forward(Tape& tape, const ScaledInput& input, const ModelParams& params, const DropoutDirective& directive,
            Rng& rng, ForwardTrace* trace = nullptr);

/// Convenience: eval-mode or forced-directive forward returning plain values.
std::vector<double> predict(const ScaledInput& input, const ModelParams& params,
                            const DropoutDirective& directive = DropoutDirective::eval());

}  // namespace mvlf
