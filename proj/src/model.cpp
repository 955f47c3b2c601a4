// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/model.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::kAdditive: return "additive";
    case Aggregation::kConcatenative: return "concatenative";
    case Aggregation::kSvd: return "svd";
  }
  return "svd";
}

Aggregation parse_aggregation(const std::string& name) {
  if (name == "additive") return Aggregation::kAdditive;
  if (name == "concatenative") return Aggregation::kConcatenative;
  if (name == "svd") return Aggregation::kSvd;
  fail(ErrorCode::kConfig, "unknown aggregation method '" + name + "' (additive|concatenative|svd)");
}

ModelConfig ModelConfig::defaults(Aggregation method) {
  ModelConfig c;
  c.method = method;
  c.d = method == Aggregation::kSvd ? 1 : 32;
  return c;
}

int ModelConfig::width(std::size_t views) const {
  return method == Aggregation::kAdditive ? d : d * static_cast<int>(views);
}

void ModelConfig::validate(std::size_t views) const {
  auto bad = [](const std::string& m) { fail(ErrorCode::kConfig, m); };
  if (d < 1) bad("embedding dim d must be positive");
  if (method == Aggregation::kSvd && d != 1) bad("the svd method forces d = 1");
  if (heads < 1) bad("heads must be positive");
  if (encoder_layers < 0 || decoder_layers < 0) bad("layer counts must be non-negative");
  if (ffn_width < 1) bad("ffn_width must be positive");
  if (horizon < 1) bad("horizon must be positive");
  if (method == Aggregation::kSvd && bins < 1) bad("svd method needs at least one quantizer bin");
  if (!(transformer_dropout >= 0.0 && transformer_dropout < 1.0)) bad("transformer dropout must lie in [0, 1)");
  if (!(embedding_dropout >= 0.0 && embedding_dropout <= 1.0)) bad("embedding dropout must lie in [0, 1]");
  if (views > 0 && width(views) % heads != 0) {
    bad("model width " + std::to_string(width(views)) + " is not divisible by " + std::to_string(heads) + " heads");
  }
}

std::string model_config_to_json(const ModelConfig& c) {
  nlohmann::json j{{"method", to_string(c.method)},
                   {"d", c.d},
                   {"heads", c.heads},
                   {"encoder_layers", c.encoder_layers},
                   {"decoder_layers", c.decoder_layers},
                   {"ffn_width", c.ffn_width},
                   {"transformer_dropout", c.transformer_dropout},
                   {"embedding_dropout", c.embedding_dropout},
                   {"horizon", c.horizon},
                   {"bins", c.bins},
                   {"reduction", c.reduction == HeadReduction::kLastRow ? "last_row" : "mean"}};
  return j.dump();
}

ModelConfig model_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("model config is not valid JSON: ") + e.what());
  }
  const Aggregation method = parse_aggregation(j.value("method", "svd"));
  ModelConfig c = ModelConfig::defaults(method);
  try {
    if (j.contains("d") && !j["d"].is_null()) c.d = j["d"].get<int>();
    c.heads = j.value("heads", c.heads);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.ffn_width = j.value("ffn_width", c.ffn_width);
    c.transformer_dropout = j.value("transformer_dropout", c.transformer_dropout);
    c.embedding_dropout = j.value("embedding_dropout", c.embedding_dropout);
    c.horizon = j.value("horizon", c.horizon);
    c.bins = j.value("bins", c.bins);
    const std::string red = j.value("reduction", "last_row");
    if (red == "last_row") c.reduction = HeadReduction::kLastRow;
    else if (red == "mean") c.reduction = HeadReduction::kMeanPool;
    else fail(ErrorCode::kConfig, "unknown head reduction '" + red + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed model config: ") + e.what());
  }
  return c;
}

int Quantizer::bin(double x) const {
  if (!fitted()) fail(ErrorCode::kState, "quantizer not fitted");
  const double w = (hi - lo) / bins;
  if (!(w > 0.0)) return 0;
  const double b = std::floor((x - lo) / w);
  return static_cast<int>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
}

double Quantizer::edge(int b) const { return b >= bins ? hi : lo + (hi - lo) * b / bins; }
double Quantizer::center(int b) const { return lo + (hi - lo) * (b + 0.5) / bins; }

namespace {

std::size_t block_count(int width, int ffn, int value_in, bool with_norms = true) {
  const std::size_t D = static_cast<std::size_t>(width);
  const std::size_t W = static_cast<std::size_t>(ffn);
  const std::size_t attn = 2 * D * D + static_cast<std::size_t>(value_in) * D + D * D + D;
  const std::size_t ffn_count = D * W + W + W * D + D;
  return attn + ffn_count + (with_norms ? 4 * D : 0);
}

std::size_t view_count(const FeatureSpec& s, const ModelConfig& c) {
  const std::size_t d = static_cast<std::size_t>(c.d);
  if (s.categorical()) return static_cast<std::size_t>(s.cardinality) * d;
  if (c.method == Aggregation::kSvd) return static_cast<std::size_t>(c.bins) * d;
  return 2 * d;
}

}  // namespace

ParamCount param_count(const ModelConfig& config, const std::vector<FeatureSpec>& specs) {
  config.validate(specs.size());
  ParamCount pc;
  for (const FeatureSpec& s : specs) pc.embeddings += view_count(s, config);
  pc.gates = specs.size();
  const int D = config.width(specs.size());
  for (int l = 0; l < config.encoder_layers; ++l) pc.encoder += block_count(D, config.ffn_width, D);
  for (int l = 0; l < config.decoder_layers; ++l) {
    pc.decoder += block_count(D, config.ffn_width, l == 0 ? static_cast<int>(specs.size()) : D);
  }
  pc.head = static_cast<std::size_t>(D) * config.horizon + config.horizon;
  return pc;
}

std::size_t ModelParams::add(std::string name, Matrix value) {
  params_.emplace_back(std::move(name), std::move(value));
  return params_.size() - 1;
}

ModelParams ModelParams::init(const ModelConfig& config, std::vector<FeatureSpec> specs, std::uint64_t seed) {
  config.validate(specs.size());
  ModelParams p;
  p.config_ = config;
  p.specs_ = std::move(specs);
  Rng rng = Rng(seed).split("init");
  auto uniform = [&rng](std::size_t r, std::size_t c, std::size_t fan_in) {
    const double a = std::sqrt(1.0 / static_cast<double>(fan_in));
    Matrix m(r, c);
    for (double& v : m.data) v = rng.uniform(-a, a);
    return m;
  };
  const std::size_t d = static_cast<std::size_t>(config.d);
  const std::size_t F = p.specs_.size();
  const std::size_t D = static_cast<std::size_t>(config.width(F));
  const std::size_t W = static_cast<std::size_t>(config.ffn_width);

  p.quantizers_.assign(F, Quantizer{});
  for (const FeatureSpec& s : p.specs_) {
    const std::string base = "embed." + s.name;
    ViewParams v;
    if (s.categorical()) {
      v.kind = ViewParams::Kind::kTable;
      v.table = p.add(base + ".table", uniform(static_cast<std::size_t>(s.cardinality), d, 1));
    } else if (config.method == Aggregation::kSvd) {
      v.kind = ViewParams::Kind::kQuantized;
      v.table = p.add(base + ".table", uniform(static_cast<std::size_t>(config.bins), d, 1));
    } else {
      v.kind = ViewParams::Kind::kAffine;
      v.weight = p.add(base + ".W", uniform(1, d, 1));
      v.bias = p.add(base + ".b", Matrix(1, d));
    }
    p.views_.push_back(v);
  }
  p.gate_ = p.add("gate", Matrix(1, F, 1.0));

  auto block = [&](const std::string& prefix, std::size_t value_in) {
    BlockParams b;
    b.attn.wq = p.add(prefix + ".attn.Wq", uniform(D, D, D));
    b.attn.wk = p.add(prefix + ".attn.Wk", uniform(D, D, D));
    b.attn.wv = p.add(prefix + ".attn.Wv", uniform(value_in, D, value_in));
    b.attn.wo = p.add(prefix + ".attn.Wo", uniform(D, D, D));
    b.attn.bo = p.add(prefix + ".attn.bo", Matrix(1, D));
    b.ln1_g = p.add(prefix + ".ln1.g", Matrix(1, D, 1.0));
    b.ln1_b = p.add(prefix + ".ln1.b", Matrix(1, D));
    b.ffn_w1 = p.add(prefix + ".ffn.W1", uniform(D, W, D));
    b.ffn_b1 = p.add(prefix + ".ffn.b1", Matrix(1, W));
    b.ffn_w2 = p.add(prefix + ".ffn.W2", uniform(W, D, W));
    b.ffn_b2 = p.add(prefix + ".ffn.b2", Matrix(1, D));
    b.ln2_g = p.add(prefix + ".ln2.g", Matrix(1, D, 1.0));
    b.ln2_b = p.add(prefix + ".ln2.b", Matrix(1, D));
    return b;
  };
  for (int l = 0; l < config.encoder_layers; ++l) p.encoder_.push_back(block("enc." + std::to_string(l), D));
  for (int l = 0; l < config.decoder_layers; ++l) {
    p.decoder_.push_back(block("dec." + std::to_string(l), l == 0 ? F : D));
  }
  const std::size_t tau = static_cast<std::size_t>(config.horizon);
  p.head_w_ = p.add("head.W", uniform(D, tau, D));
  p.head_b_ = p.add("head.b", Matrix(1, tau));
  return p;
}

Parameter& ModelParams::get(const std::string& name) {
  for (Parameter& p : params_)
    if (p.name == name) return p;
  fail(ErrorCode::kArgument, "model has no parameter '" + name + "'");
}

const Parameter& ModelParams::get(const std::string& name) const {
  return const_cast<ModelParams*>(this)->get(name);
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.size();
  return n;
}

void ModelParams::zero_grad() const {
  for (const Parameter& p : params_) p.zero_grad();
}

void ModelParams::fit_quantizers(const TimeSeriesFrame& frame, TimeRange range) {
  quantizers_.assign(specs_.size(), Quantizer{});
  if (config_.method != Aggregation::kSvd) return;
  for (std::size_t f = 0; f < specs_.size(); ++f) {
    if (specs_[f].categorical()) continue;
    const std::size_t col = frame.index_of(specs_[f].name);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < frame.rows(); ++i) {
      if (!range.contains(frame.timestamp(i)) || frame.missing(i, col)) continue;
      lo = std::min(lo, frame.value(i, col));
      hi = std::max(hi, frame.value(i, col));
    }
    if (!(lo <= hi)) fail(ErrorCode::kData, "no observed values to fit the quantizer of '" + specs_[f].name + "'");
    if (hi == lo) hi = lo + 1.0;
    quantizers_[f] = Quantizer{lo, hi, config_.bins};
  }
}

Var attention(Var q, Var k, Var v, ForwardTrace* trace) {
  if (q.cols() != k.cols()) fail(ErrorCode::kDimension, "attention: Q " + q.value().shape() + " vs K " + k.value().shape());
  if (k.rows() != v.rows()) fail(ErrorCode::kDimension, "attention: K " + k.value().shape() + " vs V " + v.value().shape());
  Var weights = softmax_rows(scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(q.cols()))));
  if (trace) trace->attention_maps.push_back(weights.value());
  return matmul(weights, v);
}

namespace {

Var multi_head(Var q, Var k, Var v, int heads, ForwardTrace* trace) {
  const std::size_t width = q.cols() / static_cast<std::size_t>(heads);
  if (heads == 1) return attention(q, k, v, trace);
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * width;
    outs.push_back(attention(slice_cols(q, off, width), slice_cols(k, off, width), slice_cols(v, off, width), trace));
  }
  return concat_cols(outs);
}

Var maybe_dropout(Var x, double p, bool training, Rng& rng) {
  return training && p > 0.0 ? dropout(x, p, rng) : x;
}

Var feed_forward(Tape& t, Var x, const BlockParams& b, const std::vector<Parameter>& ps) {
  Var hidden = relu(affine(x, t.param(ps[b.ffn_w1]), t.param(ps[b.ffn_b1])));
  return affine(hidden, t.param(ps[b.ffn_w2]), t.param(ps[b.ffn_b2]));
}

}  // namespace

Var embed_views(Tape& tape, const ScaledInput& input, const ModelParams& params, const DropoutDirective& directive,
                Rng& rng, ForwardTrace* trace) {
  const std::size_t F = params.views();
  const auto& specs = params.specs();
  const auto& ps = params.parameters();
  if (input.matrix.cols != F) {
    fail(ErrorCode::kSchema, "input has " + std::to_string(input.matrix.cols) + " views, model expects " + std::to_string(F));
  }
  for (std::size_t f = 0; f < F; ++f) {
    if (input.specs.size() == F && input.specs[f].name != specs[f].name) {
      fail(ErrorCode::kSchema, "input view " + std::to_string(f) + " is '" + input.specs[f].name + "', model expects '" +
                                   specs[f].name + "'");
    }
  }

  std::vector<std::uint8_t> keep(F, 1);
  if (directive.mode == DropoutDirective::Mode::kTrainRandom) {
    for (std::size_t f = 0; f < F; ++f) keep[f] = rng.uniform() < directive.probability ? 0 : 1;
  } else if (directive.mode == DropoutDirective::Mode::kForced) {
    if (directive.keep.size() != F) fail(ErrorCode::kArgument, "forced dropout mask length differs from view count");
    keep = directive.keep;
  }
  for (std::size_t f = 0; f < F; ++f)
    if (specs[f].role == FeatureRole::kTarget) keep[f] = 1;
  if (trace) trace->view_mask = keep;

  const std::size_t L = input.matrix.rows;
  const std::size_t d = static_cast<std::size_t>(params.config().d);
  Var gate = tape.param(ps[params.gate()]);
  std::vector<Var> parts;
  parts.reserve(F);
  std::vector<int> idx(L);
  for (std::size_t f = 0; f < F; ++f) {
    if (!keep[f]) {
      parts.push_back(tape.constant(Matrix(L, d)));
      continue;
    }
    const ViewParams& vp = params.view_params()[f];
    Var z;
    switch (vp.kind) {
      case ViewParams::Kind::kTable: {
        for (std::size_t i = 0; i < L; ++i) {
          const double x = input.matrix(i, f);
          if (x < 0 || x >= specs[f].cardinality || x != std::floor(x)) {
            fail(ErrorCode::kData, "view '" + specs[f].name + "' value " + std::to_string(x) + " outside its " +
                                       std::to_string(specs[f].cardinality) + " categories");
          }
          idx[i] = static_cast<int>(x);
        }
        z = embedding_lookup(tape.param(ps[vp.table]), idx);
        break;
      }
      case ViewParams::Kind::kQuantized: {
        const Quantizer& q = params.quantizers().at(f);
        if (!q.fitted()) fail(ErrorCode::kState, "quantizer of view '" + specs[f].name + "' not fitted");
        for (std::size_t i = 0; i < L; ++i) idx[i] = q.bin(input.matrix(i, f));
        z = embedding_lookup(tape.param(ps[vp.table]), idx);
        break;
      }
      case ViewParams::Kind::kAffine: {
        Matrix col(L, 1);
        for (std::size_t i = 0; i < L; ++i) col.data[i] = input.matrix(i, f);
        z = affine(tape.constant(std::move(col)), tape.param(ps[vp.weight]), tape.param(ps[vp.bias]));
        break;
      }
    }
    parts.push_back(scale_by(z, slice_cols(gate, f, 1)));
  }
  Var out = params.config().method == Aggregation::kAdditive ? sum_terms(parts) : concat_cols(parts);
  if (trace) trace->aggregated = out.value();
  return out;
}

Var encode(Var aggregated, const ModelParams& params, bool training, Rng& rng, ForwardTrace* trace) {
  const int D = params.width();
  if (aggregated.cols() != static_cast<std::size_t>(D)) {
    fail(ErrorCode::kDimension, "encoder expects width " + std::to_string(D) + ", got " + aggregated.value().shape());
  }
  Tape& t = *aggregated.tape();
  const auto& ps = params.parameters();
  const double p = params.config().transformer_dropout;
  Var x = aggregated;
  for (const BlockParams& b : params.encoder_blocks()) {
    Var q = matmul(x, t.param(ps[b.attn.wq]));
    Var k = matmul(x, t.param(ps[b.attn.wk]));
    Var v = matmul(x, t.param(ps[b.attn.wv]));
    Var a = affine(multi_head(q, k, v, params.config().heads, trace), t.param(ps[b.attn.wo]), t.param(ps[b.attn.bo]));
    x = layer_norm_rows(add(x, maybe_dropout(a, p, training, rng)), t.param(ps[b.ln1_g]), t.param(ps[b.ln1_b]));
    Var f = feed_forward(t, x, b, ps);
    x = layer_norm_rows(add(x, maybe_dropout(f, p, training, rng)), t.param(ps[b.ln2_g]), t.param(ps[b.ln2_b]));
  }
  if (trace) trace->encoded = x.value();
  return x;
}

Var decode(Var encoded, Var raw_input, const ModelParams& params, bool training, Rng& rng, ForwardTrace* trace) {
  Tape& t = *encoded.tape();
  const auto& ps = params.parameters();
  const double p = params.config().transformer_dropout;
  if (raw_input.cols() != params.views()) {
    fail(ErrorCode::kDimension, "decoder layer 1 takes the raw lag matrix (" + std::to_string(params.views()) +
                                    " columns), got " + raw_input.value().shape());
  }
  if (raw_input.rows() != encoded.rows()) {
    fail(ErrorCode::kDimension, "decoder: raw input " + raw_input.value().shape() + " vs encoded " + encoded.value().shape());
  }
  Var u = raw_input;
  for (const BlockParams& b : params.decoder_blocks()) {
    if (trace) trace->decoder_inputs.push_back(u.value());
    Var q = matmul(encoded, t.param(ps[b.attn.wq]));
    Var k = matmul(encoded, t.param(ps[b.attn.wk]));
    Var v = matmul(u, t.param(ps[b.attn.wv]));
    if (trace) trace->decoder_values.push_back(v.value());
    Var a = affine(multi_head(q, k, v, params.config().heads, trace), t.param(ps[b.attn.wo]), t.param(ps[b.attn.bo]));
    Var y = layer_norm_rows(add(v, maybe_dropout(a, p, training, rng)), t.param(ps[b.ln1_g]), t.param(ps[b.ln1_b]));
    Var f = feed_forward(t, y, b, ps);
    u = layer_norm_rows(add(y, maybe_dropout(f, p, training, rng)), t.param(ps[b.ln2_g]), t.param(ps[b.ln2_b]));
  }
  return params.decoder_blocks().empty() ? encoded : u;
}

Var head(Var decoded, const ModelParams& params) {
  Tape& t = *decoded.tape();
  const auto& ps = params.parameters();
  Var row = params.config().reduction == HeadReduction::kLastRow
                ? slice_rows(decoded, decoded.rows() - 1, 1)
                : scale(matmul(t.constant(Matrix(1, decoded.rows(), 1.0)), decoded), 1.0 / decoded.rows());
  return affine(row, t.param(ps[params.head_weight()]), t.param(ps[params.head_bias()]));
}

Var forward(Tape& tape, const ScaledInput& input, const ModelParams& params, const DropoutDirective& directive,
            Rng& rng, ForwardTrace* trace) {
  const std::uint64_t s = rng.next_u64();
  Rng embed_rng = Rng(s).split("embedding");
  Rng block_rng = Rng(s).split("transformer");
  const bool training = directive.training();
  Var z = embed_views(tape, input, params, directive, embed_rng, trace);
  Var h = encode(z, params, training, block_rng, trace);
  Var raw = tape.constant(input.matrix);
  Var y = decode(h, raw, params, training, block_rng, trace);
  return head(y, params);
}

std::vector<double> predict(const ScaledInput& input, const ModelParams& params, const DropoutDirective& directive) {
  Tape tape;
  Rng rng(0);
  return forward(tape, input, params, directive, rng).value().data;
}

}  // namespace mvlf
