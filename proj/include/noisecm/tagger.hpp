// Copyright 2026 The noisecm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Context-window feedforward tagger with a clean softmax head and a noisy
// head routed through the confusion model, explicit backpropagation, and
// NADAM training on interleaved clean and noisy mini-batches.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisecm/clustering.hpp"
#include "noisecm/corpus.hpp"
#include "noisecm/embeddings.hpp"
#include "noisecm/error.hpp"
#include "noisecm/evaluation.hpp"
#include "noisecm/linalg.hpp"
#include "noisecm/noise_model.hpp"

namespace noisecm {

enum class InstanceSource : std::uint8_t { kClean, kNoisy };

struct Instance {
  std::string center_word;
  std::vector<double> feature;  // (2w+1) * d
  std::size_t target = 0;       // tag index
  InstanceSource source = InstanceSource::kClean;
  ClusterId group = 0;
};

// Embeddings of positions [pos - w, pos + w], zero outside the sentence.
inline Instance featurize(const Sentence& sentence, std::size_t position,
                          const EmbeddingTable& emb, const WordClustering& clustering,
                          std::size_t window, OovPolicy oov = OovPolicy::kZero) {
  if (position >= sentence.size()) throw ShapeError("position outside sentence");
  Instance inst;
  inst.center_word = sentence.tokens[position];
  inst.group = clustering.assign(inst.center_word);
  const std::size_t d = emb.dim();
  inst.feature.assign((2 * window + 1) * d, 0.0);
  for (std::size_t slot = 0; slot < 2 * window + 1; ++slot) {
    const auto pos = static_cast<long long>(position) + static_cast<long long>(slot) -
                     static_cast<long long>(window);
    if (pos < 0 || pos >= static_cast<long long>(sentence.size())) continue;
    const auto& v = emb.lookup(sentence.tokens[static_cast<std::size_t>(pos)], oov);
    std::copy(v.begin(), v.end(), inst.feature.begin() + static_cast<std::ptrdiff_t>(slot * d));
  }
  return inst;
}

struct FeatureContext {
  const EmbeddingTable* embeddings = nullptr;
  const WordClustering* clustering = nullptr;
  TagSet tagset;
  std::size_t window = 2;
  OovPolicy oov = OovPolicy::kZero;
};

inline std::vector<Instance> featurize_corpus(const Corpus& corpus, InstanceSource source,
                                              const FeatureContext& ctx) {
  static const WordClustering kNoClusters(0);
  const WordClustering& clusters = ctx.clustering ? *ctx.clustering : kNoClusters;
  std::vector<Instance> out;
  out.reserve(corpus.token_count());
  for (const auto& s : corpus.sentences)
    for (std::size_t i = 0; i < s.size(); ++i) {
      Instance inst = featurize(s, i, *ctx.embeddings, clusters, ctx.window, ctx.oov);
      inst.source = source;
      if (s.tags) inst.target = ctx.tagset.index((*s.tags)[i]);
      out.push_back(std::move(inst));
    }
  return out;
}

// h(x) = tanh(W1 x + b1); p(y | x) = softmax(U h(x) + b_out).
struct TaggerModel {
  std::size_t window = 2;
  Matrix w1;                  // hidden x input
  std::vector<double> b1;     // hidden
  Matrix u;                   // classes x hidden
  std::vector<double> b_out;  // classes

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden() const { return w1.rows(); }
  std::size_t classes() const { return u.rows(); }

  friend bool operator==(const TaggerModel&, const TaggerModel&) = default;
};

// Glorot-uniform weights, zero biases.
inline TaggerModel init_tagger(std::size_t input_dim, std::size_t hidden, std::size_t classes,
                               std::size_t window, std::mt19937_64& rng) {
  TaggerModel m;
  m.window = window;
  m.w1 = Matrix(hidden, input_dim);
  m.b1.assign(hidden, 0.0);
  m.u = Matrix(classes, hidden);
  m.b_out.assign(classes, 0.0);
  const double a1 = std::sqrt(6.0 / double(input_dim + hidden));
  const double a2 = std::sqrt(6.0 / double(hidden + classes));
  std::uniform_real_distribution<double> d1(-a1, a1), d2(-a2, a2);
  for (double& x : m.w1.data()) x = d1(rng);
  for (double& x : m.u.data()) x = d2(rng);
  return m;
}

namespace detail {

// Hidden activations and clean probabilities for one input.
inline void forward(const TaggerModel& m, std::span<const double> x, std::vector<double>& h,
                    std::vector<double>& probs) {
  if (x.size() != m.input_dim())
    throw ShapeError("feature has length " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(m.input_dim()));
  const std::size_t H = m.hidden(), k = m.classes();
  h.resize(H);
  for (std::size_t j = 0; j < H; ++j) h[j] = std::tanh(dot(m.w1.row(j), x) + m.b1[j]);
  probs.resize(k);
  for (std::size_t c = 0; c < k; ++c) probs[c] = dot(m.u.row(c), h) + m.b_out[c];
  softmax_inplace(probs);
}

}  // namespace detail

inline std::vector<double> forward_clean(const TaggerModel& m, std::span<const double> x) {
  std::vector<double> h, probs;
  detail::forward(m, x, h, probs);
  return probs;
}

inline std::vector<double> forward_noisy(const TaggerModel& m, const ConfusionModel& cm,
                                         const Instance& inst) {
  return noisy_distribution(forward_clean(m, inst.feature), effective_matrix(cm, inst.group));
}

struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix u;
  std::vector<double> b_out;
  Matrix global;                        // empty when no confusion model
  std::map<ClusterId, Matrix> groups;  // same keys as ConfusionModel::groups
};

inline Gradients zero_gradients(const TaggerModel& m, const ConfusionModel* cm) {
  Gradients g;
  g.w1 = Matrix(m.w1.rows(), m.w1.cols());
  g.b1.assign(m.b1.size(), 0.0);
  g.u = Matrix(m.u.rows(), m.u.cols());
  g.b_out.assign(m.b_out.size(), 0.0);
  if (cm) {
    g.global = Matrix(cm->global.rows(), cm->global.cols());
    for (const auto& [id, l] : cm->groups) g.groups.emplace(id, Matrix(l.rows(), l.cols()));
  }
  return g;
}

// Parameters and matching gradients in one fixed order:
// W1, b1, U, b_out, global logits, group logits by id.
inline std::vector<std::span<double>> parameter_spans(TaggerModel& m, ConfusionModel* cm) {
  std::vector<std::span<double>> out = {m.w1.data(), m.b1, m.u.data(), m.b_out};
  if (cm) {
    out.emplace_back(cm->global.data());
    for (auto& [id, l] : cm->groups) out.emplace_back(l.data());
  }
  return out;
}

inline std::vector<std::span<double>> gradient_spans(Gradients& g) {
  std::vector<std::span<double>> out = {g.w1.data(), g.b1, g.u.data(), g.b_out};
  if (!g.global.empty()) {
    out.emplace_back(g.global.data());
    for (auto& [id, l] : g.groups) out.emplace_back(l.data());
  }
  return out;
}

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

namespace detail {

// Adds scale * d(-log q_t)/d(logits) for one instance, given the row
// softmax S of the logits and the clean probabilities c. Only column t of
// dL/dM is non-zero: dL/dM_it = -c_i / q_t.
inline void add_logit_gradient(Matrix& grad, const Matrix& S, std::span<const double> c,
                               std::size_t t, double q_t, double scale) {
  const std::size_t k = S.rows();
  for (std::size_t i = 0; i < k; ++i) {
    const double ds = -scale * c[i] / q_t;
    const double s_it = S(i, t);
    for (std::size_t j = 0; j < k; ++j)
      grad(i, j) += ds * S(i, j) * ((j == t ? 1.0 : 0.0) - s_it);
  }
}

}  // namespace detail

// Mean negative log-likelihood over the batch. Clean instances use the
// clean head; noisy instances use the noisy head when `cm` is given and
// the clean head otherwise.
inline LossAndGradients loss_and_grads(const TaggerModel& m, const ConfusionModel* cm,
                                       std::span<const Instance> batch) {
  if (batch.empty()) throw ConfigError("empty batch");
  const std::size_t H = m.hidden(), k = m.classes(), in = m.input_dim();
  LossAndGradients out;
  out.grads = zero_gradients(m, cm);
  Gradients& g = out.grads;

  // Row-softmaxed matrices are fixed for the batch.
  Matrix s_global;
  std::map<ClusterId, Matrix> s_groups;
  std::map<ClusterId, Matrix> effective;
  if (cm) {
    s_global = row_softmax(cm->global);
    for (const auto& [id, l] : cm->groups) s_groups.emplace(id, row_softmax(l));
  }
  const bool interp = cm && uses_interpolation(cm->mode);
  const double lambda = interp ? cm->lambda : 0.0;

  std::vector<double> h, c, dz(k), dc(k), dh(H), da(H);
  double total = 0.0;
  for (const Instance& inst : batch) {
    detail::forward(m, inst.feature, h, c);
    double nll;
    if (inst.source == InstanceSource::kNoisy && cm) {
      auto eff = effective.find(inst.group);
      if (eff == effective.end())
        eff = effective.emplace(inst.group, effective_matrix(*cm, inst.group)).first;
      const Matrix& M = eff->second;
      const std::size_t t = inst.target;
      double q_t = 0.0;
      for (std::size_t i = 0; i < k; ++i) q_t += M(i, t) * c[i];
      nll = -std::log(q_t);
      // dL/dc_i = -M_it / q_t, then through the clean softmax.
      double inner = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        dc[i] = -M(i, t) / q_t;
        inner += dc[i] * c[i];
      }
      for (std::size_t i = 0; i < k; ++i) dz[i] = c[i] * (dc[i] - inner);

      const bool grouped = is_cluster_mode(cm->mode) && cm->selected.count(inst.group) &&
                           s_groups.count(inst.group);
      if (grouped) {
        detail::add_logit_gradient(g.groups.at(inst.group), s_groups.at(inst.group), c, t, q_t,
                                   1.0 - lambda);
        detail::add_logit_gradient(g.global, s_global, c, t, q_t, lambda);
      } else {
        detail::add_logit_gradient(g.global, s_global, c, t, q_t, 1.0);
      }
    } else {
      nll = -std::log(c[inst.target]);
      for (std::size_t i = 0; i < k; ++i) dz[i] = c[i] - (i == inst.target ? 1.0 : 0.0);
    }
    total += nll;

    for (std::size_t i = 0; i < k; ++i) {
      g.b_out[i] += dz[i];
      auto urow = g.u.row(i);
      for (std::size_t j = 0; j < H; ++j) urow[j] += dz[i] * h[j];
    }
    for (std::size_t j = 0; j < H; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += m.u(i, j) * dz[i];
      da[j] = s * (1.0 - h[j] * h[j]);
      g.b1[j] += da[j];
      if (da[j] == 0.0) continue;
      auto wrow = g.w1.row(j);
      for (std::size_t x = 0; x < in; ++x) wrow[x] += da[j] * inst.feature[x];
    }
  }

  const double n = double(batch.size());
  out.loss = total / n;
  if (!std::isfinite(out.loss)) {
    std::ostringstream msg;
    msg << "non-finite loss " << out.loss << " on a batch of " << batch.size()
        << " instances (first word '" << batch.front().center_word << "')";
    throw NumericalError(msg.str());
  }
  for (auto span : gradient_spans(g))
    for (double& x : span) x /= n;
  return out;
}

// ---------------------------------------------------------------------------
// NADAM

struct NadamConfig {
  double learning_rate = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct NadamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;

  friend bool operator==(const NadamState&, const NadamState&) = default;
};

// One Nesterov-accelerated Adam step over the concatenation of `params`:
//   m_t = b1 m + (1 - b1) g,   v_t = b2 v + (1 - b2) g^2
//   p  -= lr * (b1 m_t / (1 - b1^t) + (1 - b1) g / (1 - b1^t)) / (sqrt(v_t / (1 - b2^t)) + eps)
inline void nadam_step(const std::vector<std::span<double>>& params,
                       const std::vector<std::span<double>>& grads, NadamState& state,
                       const NadamConfig& cfg) {
  if (params.size() != grads.size()) throw ShapeError("parameter/gradient count mismatch");
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size()) throw ShapeError("parameter/gradient shape mismatch");
    total += params[i].size();
  }
  if (state.m.empty() && state.t == 0) {
    state.m.assign(total, 0.0);
    state.v.assign(total, 0.0);
  }
  if (state.m.size() != total) throw ShapeError("optimizer state does not match parameters");

  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
  std::size_t off = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j, ++off) {
      double& m = state.m[off];
      double& v = state.v[off];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g[j];
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      const double nesterov = cfg.beta1 * m_hat + (1.0 - cfg.beta1) * g[j] / bc1;
      p[j] -= cfg.learning_rate * nesterov / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

// ---------------------------------------------------------------------------
// Training

enum class TrainingMode {
  kBase,        // clean data only
  kBaseNoise,   // clean and noisy data, noisy labels taken at face value
  kNoiseLayer,  // noisy batches through the confusion model
};

struct TrainConfig {
  NadamConfig optimizer;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  std::size_t clean_ratio = 1;  // clean:noisy mini-batches per round
  std::size_t noisy_ratio = 1;
  std::size_t patience = 5;
  std::size_t hidden = 128;
  bool train_noise_layer = true;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double dev_precision = 0.0;
  double dev_recall = 0.0;
  double dev_f1 = 0.0;
};

struct TrainResult {
  TaggerModel model;
  std::optional<ConfusionModel> confusion;
  NadamState optimizer;
  std::vector<EpochLog> log;
  std::vector<double> batch_losses;
  std::size_t best_epoch = 0;
  double best_dev_f1 = 0.0;
};

inline std::vector<std::size_t> predict_indices(const TaggerModel& m,
                                                std::span<const Instance> instances) {
  std::vector<std::size_t> out;
  out.reserve(instances.size());
  std::vector<double> h, probs;
  for (const auto& inst : instances) {
    detail::forward(m, inst.feature, h, probs);
    out.push_back(static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) -
                                           probs.begin()));
  }
  return out;
}

// Tags every sentence with the clean head; the output uses IOB2.
inline Corpus predict(const TaggerModel& m, const Corpus& corpus, const FeatureContext& ctx) {
  Corpus untagged = strip_tags(corpus);
  const auto instances = featurize_corpus(untagged, InstanceSource::kClean, ctx);
  const auto labels = predict_indices(m, instances);
  Corpus out{{}, CorpusRole::kTest};
  std::size_t pos = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<Tag> io;
    for (std::size_t i = 0; i < s.size(); ++i) io.push_back(ctx.tagset.tag(labels[pos++]));
    out.sentences.push_back({s.tokens, io_to_iob2(io)});
  }
  return out;
}

namespace detail {

inline EvalReport evaluate_instances(const TaggerModel& m, std::span<const Instance> dev,
                                     const Corpus& dev_corpus, const TagSet& tagset) {
  const auto labels = predict_indices(m, dev);
  Corpus pred{{}, CorpusRole::kTest};
  std::size_t pos = 0;
  for (const auto& s : dev_corpus.sentences) {
    std::vector<Tag> io;
    for (std::size_t i = 0; i < s.size(); ++i) io.push_back(tagset.tag(labels[pos++]));
    pred.sentences.push_back({s.tokens, io_to_iob2(io)});
  }
  return score(dev_corpus, pred);
}

}  // namespace detail

// Epoch = one pass over the shuffled clean instances in rounds of
// `clean_ratio` clean batches followed by `noisy_ratio` noisy batches, the
// noisy stream cycling (and reshuffling) as needed. Every batch is one
// optimizer step. Returns the parameters of the best dev-F1 epoch.
inline TrainResult train(const Corpus& clean, const Corpus& noisy, const Corpus& dev,
                         std::optional<ConfusionModel> cm, const FeatureContext& ctx,
                         const TrainConfig& cfg, TrainingMode mode) {
  if (clean.sentences.empty() || clean.token_count() == 0)
    throw ConfigError("training needs a non-empty clean corpus");
  if (dev.sentences.empty()) throw ConfigError("training needs a non-empty dev corpus");
  if (mode == TrainingMode::kNoiseLayer && !cm)
    throw ConfigError("noise-layer training needs a confusion model");
  if (mode != TrainingMode::kNoiseLayer) cm.reset();
  if (cfg.batch_size == 0 || cfg.clean_ratio == 0) throw ConfigError("bad batch configuration");

  std::mt19937_64 rng(cfg.seed);
  const std::size_t input = (2 * ctx.window + 1) * ctx.embeddings->dim();
  TrainResult res;
  res.model = init_tagger(input, cfg.hidden, ctx.tagset.size(), ctx.window, rng);
  res.confusion = cm;
  if (cfg.epochs == 0) return res;

  const auto clean_inst = featurize_corpus(clean, InstanceSource::kClean, ctx);
  std::vector<Instance> noisy_inst;
  if (mode != TrainingMode::kBase)
    noisy_inst = featurize_corpus(noisy, InstanceSource::kNoisy, ctx);
  const auto dev_inst = featurize_corpus(dev, InstanceSource::kClean, ctx);

  TaggerModel model = res.model;
  std::optional<ConfusionModel> conf = cm;
  NadamState state;
  ConfusionModel* cm_ptr = conf ? &*conf : nullptr;

  std::vector<std::size_t> clean_order(clean_inst.size());
  std::iota(clean_order.begin(), clean_order.end(), std::size_t{0});
  std::vector<std::size_t> noisy_order(noisy_inst.size());
  std::iota(noisy_order.begin(), noisy_order.end(), std::size_t{0});
  std::size_t noisy_cursor = noisy_order.size();  // forces a shuffle on first use

  std::vector<Instance> batch;
  auto step = [&](double& epoch_loss, std::size_t& steps) {
    auto lg = loss_and_grads(model, cm_ptr, batch);
    auto params = parameter_spans(model, cm_ptr);
    auto grads = gradient_spans(lg.grads);
    if (cm_ptr && !cfg.train_noise_layer) {
      params.resize(4);
      grads.resize(4);
    }
    nadam_step(params, grads, state, cfg.optimizer);
    res.batch_losses.push_back(lg.loss);
    epoch_loss += lg.loss;
    ++steps;
  };

  std::size_t since_best = 0;
  bool have_best = false;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(clean_order.begin(), clean_order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t steps = 0;
    std::size_t pos = 0;
    while (pos < clean_order.size()) {
      for (std::size_t r = 0; r < cfg.clean_ratio && pos < clean_order.size(); ++r) {
        batch.clear();
        for (std::size_t b = 0; b < cfg.batch_size && pos < clean_order.size(); ++b)
          batch.push_back(clean_inst[clean_order[pos++]]);
        step(epoch_loss, steps);
      }
      if (noisy_inst.empty()) continue;
      for (std::size_t r = 0; r < cfg.noisy_ratio; ++r) {
        batch.clear();
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
          if (noisy_cursor == noisy_order.size()) {
            std::shuffle(noisy_order.begin(), noisy_order.end(), rng);
            noisy_cursor = 0;
          }
          batch.push_back(noisy_inst[noisy_order[noisy_cursor++]]);
        }
        step(epoch_loss, steps);
      }
    }

    const EvalReport dev_report =
        detail::evaluate_instances(model, dev_inst, dev, ctx.tagset);
    res.log.push_back({epoch, epoch_loss / double(steps), dev_report.precision(),
                       dev_report.recall(), dev_report.f1()});
    if (!have_best || dev_report.f1() > res.best_dev_f1) {
      have_best = true;
      res.best_dev_f1 = dev_report.f1();
      res.best_epoch = epoch;
      res.model = model;
      res.confusion = conf;
      res.optimizer = state;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json to_json(const EpochLog& e) {
  return {{"epoch", e.epoch},
          {"loss", e.loss},
          {"dev_precision", e.dev_precision},
          {"dev_recall", e.dev_recall},
          {"dev_f1", e.dev_f1}};
}

inline nlohmann::json checkpoint_to_json(const TrainResult& r, const TagSet& tagset) {
  const TaggerModel& m = r.model;
  nlohmann::json j;
  j["format"] = "noisecm.checkpoint";
  j["version"] = kCheckpointVersion;
  j["entity_types"] = tagset.entity_types();
  j["window"] = m.window;
  j["input_dim"] = m.input_dim();
  j["hidden"] = m.hidden();
  j["classes"] = m.classes();
  j["w1"] = m.w1.data();
  j["b1"] = m.b1;
  j["u"] = m.u.data();
  j["b_out"] = m.b_out;
  j["optimizer"] = {{"t", r.optimizer.t}, {"m", r.optimizer.m}, {"v", r.optimizer.v}};
  j["epoch"] = r.best_epoch;
  j["dev_f1"] = r.best_dev_f1;
  j["confusion"] = r.confusion ? to_json(*r.confusion) : nlohmann::json(nullptr);
  return j;
}

struct Checkpoint {
  TagSet tagset;
  TrainResult result;
};

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "noisecm.checkpoint") throw ParseError("not a checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw ParseError("unsupported checkpoint version");
    Checkpoint c;
    c.tagset = TagSet(j.at("entity_types").get<std::vector<std::string>>());
    const auto in = j.at("input_dim").get<std::size_t>();
    const auto H = j.at("hidden").get<std::size_t>();
    const auto k = j.at("classes").get<std::size_t>();
    if (k != c.tagset.size()) throw ParseError("checkpoint class count does not match tag set");
    TaggerModel& m = c.result.model;
    m.window = j.at("window").get<std::size_t>();
    m.w1 = Matrix(H, in);
    m.u = Matrix(k, H);
    auto load = [](const nlohmann::json& arr, std::vector<double>& dst, std::size_t n) {
      auto v = arr.get<std::vector<double>>();
      if (v.size() != n) throw ParseError("checkpoint tensor has the wrong size");
      dst = std::move(v);
    };
    load(j.at("w1"), m.w1.data(), H * in);
    load(j.at("b1"), m.b1, H);
    load(j.at("u"), m.u.data(), k * H);
    load(j.at("b_out"), m.b_out, k);
    c.result.optimizer.t = j.at("optimizer").at("t").get<std::uint64_t>();
    c.result.optimizer.m = j.at("optimizer").at("m").get<std::vector<double>>();
    c.result.optimizer.v = j.at("optimizer").at("v").get<std::vector<double>>();
    c.result.best_epoch = j.at("epoch").get<std::size_t>();
    c.result.best_dev_f1 = j.at("dev_f1").get<double>();
    if (!j.at("confusion").is_null()) c.result.confusion = confusion_from_json(j.at("confusion"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint JSON: ") + e.what());
  }
}

}  // namespace noisecm
