// Copyright 2026 The mvlf Authors
// SPDX-License-Identifier: Apache-2.0

#include "mvlf/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "mvlf/error.hpp"

namespace mvlf {

using nlohmann::json;

double mape(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    fail(ErrorCode::kDimension, "mape: " + std::to_string(y.size()) + " targets vs " + std::to_string(yhat.size()) +
                                    " predictions");
  }
  if (y.empty()) fail(ErrorCode::kArgument, "mape of an empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(std::abs(y[i]) > kMapeEpsilon)) {
      fail(ErrorCode::kData, "MAPE undefined: |y| <= 1e-6 at index " + std::to_string(i));
    }
    acc += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
  }
  return 100.0 * acc / static_cast<double>(y.size());
}

double mse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) fail(ErrorCode::kDimension, "mse: length mismatch");
  if (y.empty()) fail(ErrorCode::kArgument, "mse of an empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return acc / static_cast<double>(y.size());
}

Splits split_chronological(const TimeSeriesFrame& frame, const SplitSpec& spec) {
  if (spec.test_months < 1 || spec.validation_months < 0 || spec.train_months < 1) {
    fail(ErrorCode::kConfig, "split months must be positive (validation may be 0)");
  }
  const TimeRange all = frame.span();
  const Timestamp test_begin = all.end.add_months(-spec.test_months);
  const Timestamp val_begin = test_begin.add_months(-spec.validation_months);
  const Timestamp train_begin = std::max(all.begin, val_begin.add_months(-spec.train_months));
  if (!(train_begin < val_begin)) {
    const int need = spec.test_months + spec.validation_months;
    fail(ErrorCode::kData, "insufficient history for the split: needs more than " + std::to_string(need) +
                               " months, frame spans " + all.begin.iso() + " to " + all.end.iso());
  }
  return Splits{{train_begin, val_begin}, {val_begin, test_begin}, {test_begin, all.end}};
}

namespace {

const char* loss_name(LossKind k) { return k == LossKind::kMape ? "mape" : "mse"; }

json train_config_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr", c.lr},
              {"weight_decay", c.weight_decay},
              {"loss", loss_name(c.loss)},
              {"seed", c.seed},
              {"split",
               {{"test_months", c.split.test_months},
                {"validation_months", c.split.validation_months},
                {"train_months", c.split.train_months}}},
              {"train_stride", c.train_stride},
              {"val_stride", c.val_stride},
              {"max_lag", c.max_lag ? json(*c.max_lag) : json(nullptr)},
              {"history_before_train", c.history_before_train}};
}

TrainConfig train_config_parse(const json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  const std::string loss = j.value("loss", "mape");
  if (loss == "mape") c.loss = LossKind::kMape;
  else if (loss == "mse") c.loss = LossKind::kMse;
  else fail(ErrorCode::kConfig, "unknown loss '" + loss + "' (mape|mse)");
  c.seed = j.value("seed", c.seed);
  if (j.contains("split")) {
    const json& s = j["split"];
    c.split.test_months = s.value("test_months", c.split.test_months);
    c.split.validation_months = s.value("validation_months", c.split.validation_months);
    c.split.train_months = s.value("train_months", c.split.train_months);
  }
  c.train_stride = j.value("train_stride", c.train_stride);
  c.val_stride = j.value("val_stride", c.val_stride);
  if (j.contains("max_lag") && !j["max_lag"].is_null()) c.max_lag = j["max_lag"].get<int>();
  c.history_before_train = j.value("history_before_train", c.history_before_train);
  if (c.epochs < 0 || c.batch_size < 1 || c.train_stride < 1 || c.val_stride < 1 || !(c.lr >= 0.0) ||
      !(c.weight_decay >= 0.0)) {
    fail(ErrorCode::kConfig, "train config: epochs >= 0, batch_size/strides >= 1, lr and weight_decay >= 0");
  }
  return c;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& c) { return train_config_json(c).dump(); }

TrainConfig train_config_from_json(const std::string& text) {
  try {
    return train_config_parse(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed train config: ") + e.what());
  }
}

double cosine_lr(int epoch, const TrainConfig& config) {
  if (config.epochs <= 0) return config.lr;
  return config.lr * (1.0 + std::cos(std::numbers::pi * epoch / config.epochs)) / 2.0;
}

AdamState AdamState::zeros(std::span<const Parameter> params) {
  AdamState s;
  for (const Parameter& p : params) {
    s.m.emplace_back(p.value.rows, p.value.cols);
    s.v.emplace_back(p.value.rows, p.value.cols);
  }
  return s;
}

void adamw_step(std::span<Parameter> params, AdamState& state, double lr, double weight_decay) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    fail(ErrorCode::kDimension, "optimizer state holds " + std::to_string(state.m.size()) + " moments for " +
                                    std::to_string(params.size()) + " parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.step));
  const double decay = 1.0 - lr * weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    if (!p.grad.same_shape(p.value) || !m.same_shape(p.value)) {
      fail(ErrorCode::kDimension, "optimizer shape mismatch for '" + p.name + "'");
    }
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad.data[k];
      double& theta = p.value.data[k];
      theta *= decay;
      m.data[k] = AdamState::kBeta1 * m.data[k] + (1.0 - AdamState::kBeta1) * g;
      v.data[k] = AdamState::kBeta2 * v.data[k] + (1.0 - AdamState::kBeta2) * g * g;
      theta -= lr * (m.data[k] / c1) / (std::sqrt(v.data[k] / c2) + AdamState::kEps);
    }
  }
}

std::string format_history_csv(std::span<const HistoryEntry> history) {
  std::string out = "epoch,lr,train_loss,val_loss\n";
  for (const HistoryEntry& h : history) {
    out += std::to_string(h.epoch) + "," + format_double(h.lr) + "," + format_double(h.train_loss) + "," +
           (h.val_loss ? format_double(*h.val_loss) : std::string()) + "\n";
  }
  return out;
}

std::uint64_t config_fingerprint(const ModelConfig& model, std::span<const FeatureSpec> specs,
                                 const TrainConfig& train) {
  const json canonical{{"model", json::parse(model_config_to_json(model))},
                       {"schema", json::parse(schema_to_json(specs))},
                       {"train", train_config_json(train)}};
  return fnv1a64(canonical.dump());
}

std::vector<Timestamp> training_anchors(const TimeSeriesFrame& frame, const LagSet& lags, int horizon, TimeRange range,
                                        int stride, bool history_before_range) {
  std::vector<Timestamp> out;
  const Timestamp first_allowed = history_before_range ? range.begin : range.begin + lags.max();
  std::int64_t next = first_allowed.hours();
  for (std::size_t i : valid_indices(frame, lags, horizon)) {
    const Timestamp t = frame.timestamp(i);
    if (t < first_allowed || t.hours() < next) continue;
    if (!(t + horizon < range.end)) break;
    out.push_back(t);
    next = t.hours() + stride;
  }
  return out;
}

TrainedModel Checkpoint::best() const {
  TrainedModel out = current;
  if (!best_values.empty()) {
    auto& ps = out.params.parameters();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i].value = best_values.at(i);
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'M', 'V', 'L', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

json lagset_json(const LagSet& l) { return json(l.lags()); }

json splits_json(const Splits& s) {
  auto r = [](TimeRange t) { return json::array({t.begin.iso(), t.end.iso()}); };
  return json{{"train", r(s.train)}, {"validation", r(s.validation)}, {"test", r(s.test)}};
}

Splits splits_parse(const json& j) {
  auto r = [](const json& a) {
    return TimeRange{Timestamp::parse_iso(a.at(0).get<std::string>()), Timestamp::parse_iso(a.at(1).get<std::string>())};
  };
  return Splits{r(j.at("train")), r(j.at("validation")), r(j.at("test"))};
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

void put_doubles(std::string& out, const Matrix& m) {
  for (double d : m.data) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

void get_doubles(const std::string& in, std::size_t& at, Matrix& m) {
  if (at + 8 * m.size() > in.size()) fail(ErrorCode::kParse, "checkpoint truncated");
  for (double& d : m.data) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    d = std::bit_cast<double>(bits);
    at += 8;
  }
}

}  // namespace

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  const ModelParams& p = c.current.params;
  json arrays = json::array();
  for (const Parameter& q : p.parameters()) arrays.push_back({q.name, q.value.rows, q.value.cols});
  json quant = json::array();
  for (const Quantizer& q : p.quantizers()) quant.push_back({q.lo, q.hi, q.bins});
  json hist = json::array();
  for (const HistoryEntry& h : c.history) {
    hist.push_back({h.epoch, h.lr, h.train_loss, h.val_loss ? json(*h.val_loss) : json(nullptr)});
  }
  const json header{{"fingerprint", std::to_string(c.fingerprint)},
                    {"model", json::parse(model_config_to_json(c.model_config))},
                    {"train", train_config_json(c.train_config)},
                    {"schema", json::parse(schema_to_json(p.specs()))},
                    {"splits", splits_json(c.splits)},
                    {"scaler", json::parse(c.current.scaler.to_json())},
                    {"lags", lagset_json(c.current.lagset)},
                    {"quantizers", quant},
                    {"arrays", arrays},
                    {"has_best", !c.best_values.empty()},
                    {"best_val", c.best_val ? json(*c.best_val) : json(nullptr)},
                    {"best_epoch", c.best_epoch},
                    {"adam_step", c.adam.step},
                    {"epochs_done", c.epochs_done},
                    {"rng", {std::to_string(c.rng_seed), std::to_string(c.rng_counter)}},
                    {"history", hist}};
  std::string out(kMagic, kMagic + 8);
  put_u32(out, kCheckpointVersion);
  const std::string text = header.dump();
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const Parameter& q : p.parameters()) put_doubles(out, q.value);
  for (const Matrix& m : c.best_values) put_doubles(out, m);
  for (const Matrix& m : c.adam.m) put_doubles(out, m);
  for (const Matrix& m : c.adam.v) put_doubles(out, m);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::kIo, "cannot write checkpoint '" + path + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) fail(ErrorCode::kIo, "short write to '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(ErrorCode::kIo, "cannot move checkpoint into '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string in = ss.str();
  if (in.size() < 16 || std::memcmp(in.data(), kMagic, 8) != 0) {
    fail(ErrorCode::kParse, "'" + path + "' is not a checkpoint file");
  }
  if (get_u32(in, 8) != kCheckpointVersion) {
    fail(ErrorCode::kParse, "unsupported checkpoint version " + std::to_string(get_u32(in, 8)));
  }
  const std::size_t hlen = get_u32(in, 12);
  if (16 + hlen > in.size()) fail(ErrorCode::kParse, "checkpoint truncated");
  Checkpoint c;
  try {
    const json h = json::parse(in.substr(16, hlen));
    c.fingerprint = std::stoull(h.at("fingerprint").get<std::string>());
    c.model_config = model_config_from_json(h.at("model").dump());
    c.train_config = train_config_parse(h.at("train"));
    c.splits = splits_parse(h.at("splits"));
    std::vector<FeatureSpec> specs = schema_from_json(h.at("schema").dump());
    c.current.params = ModelParams::init(c.model_config, specs, 0);
    c.current.scaler = Scaler::from_json(h.at("scaler").dump());
    c.current.lagset = LagSet(h.at("lags").get<std::vector<int>>());
    std::vector<Quantizer> quant;
    for (const json& q : h.at("quantizers")) quant.push_back({q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<int>()});
    c.current.params.set_quantizers(std::move(quant));
    auto& ps = c.current.params.parameters();
    const json& arrays = h.at("arrays");
    if (arrays.size() != ps.size()) fail(ErrorCode::kParse, "checkpoint array count differs from the model layout");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (arrays[i].at(0).get<std::string>() != ps[i].name || arrays[i].at(1).get<std::size_t>() != ps[i].value.rows ||
          arrays[i].at(2).get<std::size_t>() != ps[i].value.cols) {
        fail(ErrorCode::kParse, "checkpoint array " + std::to_string(i) + " does not match parameter '" + ps[i].name + "'");
      }
    }
    if (h.at("best_val").is_null()) c.best_val.reset();
    else c.best_val = h.at("best_val").get<double>();
    c.best_epoch = h.at("best_epoch").get<int>();
    c.adam.step = h.at("adam_step").get<std::int64_t>();
    c.epochs_done = h.at("epochs_done").get<int>();
    c.rng_seed = std::stoull(h.at("rng").at(0).get<std::string>());
    c.rng_counter = std::stoull(h.at("rng").at(1).get<std::string>());
    for (const json& e : h.at("history")) {
      HistoryEntry he{e.at(0).get<int>(), e.at(1).get<double>(), e.at(2).get<double>(), std::nullopt};
      if (!e.at(3).is_null()) he.val_loss = e.at(3).get<double>();
      c.history.push_back(he);
    }
    std::size_t at = 16 + hlen;
    for (Parameter& p : ps) get_doubles(in, at, p.value);
    if (h.at("has_best").get<bool>()) {
      for (const Parameter& p : ps) {
        c.best_values.emplace_back(p.value.rows, p.value.cols);
        get_doubles(in, at, c.best_values.back());
      }
    }
    c.adam = [&] {
      AdamState a = AdamState::zeros(ps);
      a.step = h.at("adam_step").get<std::int64_t>();
      return a;
    }();
    for (Matrix& m : c.adam.m) get_doubles(in, at, m);
    for (Matrix& m : c.adam.v) get_doubles(in, at, m);
    if (at != in.size()) fail(ErrorCode::kParse, "checkpoint has trailing bytes");
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, "malformed checkpoint header: " + std::string(e.what()));
  } catch (const std::logic_error& e) {
    fail(ErrorCode::kParse, "malformed checkpoint header: " + std::string(e.what()));
  }
  return c;
}

namespace {

struct Batch {
  std::vector<ScaledInput> inputs;
  std::vector<double> truth;  // loss units, row-major batch x tau
};

Batch make_batch(const TimeSeriesFrame& raw, const TimeSeriesFrame& scaled, std::span<const Timestamp> anchors,
                 const LagSet& lags, int tau, LossKind loss) {
  Batch b;
  const TimeSeriesFrame& truth_frame = loss == LossKind::kMape ? raw : scaled;
  const std::size_t target = raw.target_index();
  for (TrainingExample& ex : build_batch(scaled, {anchors.begin(), anchors.end()}, lags, tau)) {
    const std::size_t row = *truth_frame.row_of(ex.input.anchor);
    for (int h = 1; h <= tau; ++h) b.truth.push_back(truth_frame.value(row + static_cast<std::size_t>(h), target));
    b.inputs.push_back(std::move(ex.input));
  }
  return b;
}

}  // namespace

TrainResult train(const TimeSeriesFrame& frame, const ModelConfig& model_config, const TrainConfig& config,
                  const TrainHooks& hooks, std::optional<Splits> splits_opt) {
  model_config.validate(frame.features());
  if (config.batch_size < 1 || config.train_stride < 1 || config.val_stride < 1) {
    fail(ErrorCode::kConfig, "batch_size and strides must be positive");
  }
  const Splits splits = splits_opt ? *splits_opt : split_chronological(frame, config.split);
  const LagSet lags = effective_lagset(frame.rows(), LagSet::defaults(), config.max_lag);
  const int tau = model_config.horizon;
  const std::uint64_t fingerprint = config_fingerprint(model_config, frame.specs(), config);

  Checkpoint ck;
  if (hooks.resume) {
    if (hooks.resume->fingerprint != fingerprint) {
      fail(ErrorCode::kFingerprint, "checkpoint fingerprint " + std::to_string(hooks.resume->fingerprint) +
                                        " does not match this configuration (" + std::to_string(fingerprint) + ")");
    }
    ck = *hooks.resume;
  } else {
    ck.fingerprint = fingerprint;
    ck.model_config = model_config;
    ck.train_config = config;
    ck.splits = splits;
    ck.current.scaler = Scaler::fit(frame, splits.train);
    ck.current.lagset = lags;
    ck.current.params = ModelParams::init(model_config, frame.specs(), Rng(config.seed).split("params").next_u64());
    const Rng train_rng = Rng(config.seed).split("train");
    ck.rng_seed = train_rng.seed();
    ck.rng_counter = train_rng.counter();
    ck.adam = AdamState::zeros(ck.current.params.parameters());
  }
  const Scaler& scaler = ck.current.scaler;
  const TimeSeriesFrame scaled = scaler.apply(frame);
  ModelParams& params = ck.current.params;
  if (!hooks.resume) params.fit_quantizers(scaled, ck.splits.train);

  const auto train_anchors =
      training_anchors(scaled, ck.current.lagset, tau, ck.splits.train, config.train_stride, config.history_before_train);
  if (train_anchors.empty()) {
    fail(ErrorCode::kData, "no training anchors in " + ck.splits.train.begin.iso() + " .. " + ck.splits.train.end.iso() +
                               " (largest lag " + std::to_string(ck.current.lagset.max()) + "h, horizon " +
                               std::to_string(tau) + "h)");
  }
  std::vector<Timestamp> val_anchors;
  if (ck.splits.validation.hours() > 0) {
    val_anchors = training_anchors(scaled, ck.current.lagset, tau, ck.splits.validation, config.val_stride, true);
  }

  std::vector<Batch> batches;
  for (std::size_t i = 0; i < train_anchors.size(); i += static_cast<std::size_t>(config.batch_size)) {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), train_anchors.size() - i);
    batches.push_back(make_batch(frame, scaled, std::span(train_anchors).subspan(i, n), ck.current.lagset, tau, config.loss));
  }
  const Batch val_batch =
      val_anchors.empty() ? Batch{} : make_batch(frame, scaled, val_anchors, ck.current.lagset, tau, config.loss);

  const std::size_t target = frame.target_index();
  const double sigma = scaler.stats(target).stddev;
  const double mu = scaler.stats(target).mean;
  auto loss_of = [&](Tape& tape, const Batch& b, const DropoutDirective& dir, Rng& rng) {
    std::vector<Var> rows;
    rows.reserve(b.inputs.size());
    for (const ScaledInput& in : b.inputs) rows.push_back(forward(tape, in, params, dir, rng));
    Var pred = rows.size() == 1 ? rows.front() : concat_rows(rows);
    if (config.loss == LossKind::kMse) return mse_loss(pred, b.truth);
    return mape_loss(shift(scale(pred, sigma), mu), b.truth);
  };

  Rng rng(ck.rng_seed, ck.rng_counter);
  const DropoutDirective train_mode = DropoutDirective::train(model_config.embedding_dropout);
  for (int epoch = ck.epochs_done; epoch < config.epochs; ++epoch) {
    if (hooks.stop_after_epochs >= 0 && ck.epochs_done >= hooks.stop_after_epochs) break;
    const double lr = cosine_lr(epoch, config);
    double total = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      params.zero_grad();
      Tape tape;
      Var loss = loss_of(tape, batches[bi], train_mode, rng);
      if (!std::isfinite(loss.scalar())) {
        fail(ErrorCode::kNumeric, "training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(bi));
      }
      tape.backward(loss);
      adamw_step(params.parameters(), ck.adam, lr, config.weight_decay);
      total += loss.scalar();
    }
    HistoryEntry entry{epoch, lr, total / static_cast<double>(batches.size()), std::nullopt};
    if (!val_batch.inputs.empty()) {
      Tape tape;
      Rng eval_rng(0);
      const double v = loss_of(tape, val_batch, DropoutDirective::eval(), eval_rng).scalar();
      if (!std::isfinite(v)) {
        fail(ErrorCode::kNumeric, "training diverged: non-finite validation loss at epoch " + std::to_string(epoch));
      }
      entry.val_loss = v;
      if (!ck.best_val || v < *ck.best_val) {
        ck.best_val = v;
        ck.best_epoch = epoch;
        ck.best_values.clear();
        for (const Parameter& p : params.parameters()) ck.best_values.push_back(p.value);
      }
    }
    ck.history.push_back(entry);
    ck.epochs_done = epoch + 1;
    ck.rng_seed = rng.seed();
    ck.rng_counter = rng.counter();
    if (hooks.on_epoch) hooks.on_epoch(entry);
    if (hooks.on_checkpoint) hooks.on_checkpoint(ck);
  }
  params.zero_grad();
  TrainResult result{ck, ck.best()};
  return result;
}

std::vector<Fold> cv_folds(const TimeSeriesFrame& frame, const LagSet& lags, int train_months, int test_months,
                           int step_months) {
  if (train_months < 1 || test_months < 1 || step_months < 1) fail(ErrorCode::kConfig, "CV windows must be positive");
  const Timestamp usable = frame.start() + lags.max();
  const Timestamp end = frame.span().end;
  std::vector<Fold> folds;
  for (int k = 0;; k += step_months) {
    const Timestamp a = usable.add_months(k);
    const Timestamp b = usable.add_months(k + train_months);
    const Timestamp c = usable.add_months(k + train_months + test_months);
    if (c > end) break;
    folds.push_back(Fold{{a, b}, {b, c}});
  }
  if (folds.empty()) {
    fail(ErrorCode::kData, "rolling CV yields 0 folds: needs " + std::to_string(train_months + test_months) +
                               " months after the " + std::to_string(lags.max()) + "h lag warm-up");
  }
  return folds;
}

}  // namespace mvlf
