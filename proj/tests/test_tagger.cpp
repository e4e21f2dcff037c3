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

#include <gtest/gtest.h>

#include <random>

#include "noisecm.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace noisecm;

namespace {

TaggerModel zero_model(std::size_t in, std::size_t H, std::size_t k) {
  TaggerModel m;
  m.window = 0;
  m.w1 = Matrix(H, in);
  m.b1.assign(H, 0.0);
  m.u = Matrix(k, H);
  m.b_out.assign(k, 0.0);
  return m;
}

struct TinySetup {
  SyntheticData data;
  FeatureContext ctx;
  TrainConfig cfg;

  explicit TinySetup(std::uint64_t seed = 3) : data(generate(fixtures::tiny_spec(seed))) {
    ctx = {&data.embeddings, &data.clusters, data.tagset, 1, OovPolicy::kZero};
    cfg.epochs = 3;
    cfg.hidden = 8;
    cfg.batch_size = 16;
    cfg.seed = seed;
  }

  ConfusionModel model(NoiseMode mode, std::optional<double> lambda) const {
    NoiseModelOptions opt;
    opt.mode = mode;
    opt.lambda = lambda;
    return build_model(zip_pairs(data.clean, data.clean_noisy), data.clusters, opt, data.tagset);
  }
};

}  // namespace

TEST(Featurize, WindowZeroIsCenterEmbedding) {
  EmbeddingTable emb(2);
  emb.add("a", {1, 2});
  emb.add("b", {3, 4});
  const Sentence s{{"a", "b"}, std::nullopt};
  const auto inst = featurize(s, 1, emb, WordClustering(0), 0);
  EXPECT_EQ(inst.feature, (std::vector<double>{3, 4}));
}

TEST(Featurize, PaddingAtSentenceStart) {
  EmbeddingTable emb(2);
  emb.add("a", {1, 2});
  emb.add("b", {3, 4});
  const Sentence s{{"a", "b"}, std::nullopt};
  const auto inst = featurize(s, 0, emb, WordClustering(0), 1);
  EXPECT_EQ(inst.feature, (std::vector<double>{0, 0, 1, 2, 3, 4}));
}

TEST(Featurize, OovCenterWord) {
  EmbeddingTable emb(2);
  emb.add("a", {1, 2});
  emb.add("b", {3, 6});
  WordClustering c(2);
  c.set("a", 1);
  const Sentence s{{"zzz"}, std::nullopt};
  const auto zero = featurize(s, 0, emb, c, 0, OovPolicy::kZero);
  EXPECT_EQ(zero.group, c.oov_id());
  EXPECT_EQ(zero.feature, (std::vector<double>{0, 0}));
  EXPECT_EQ(featurize(s, 0, emb, c, 0, OovPolicy::kMean).feature, (std::vector<double>{2, 4}));
  EXPECT_THROW(featurize(s, 1, emb, c, 0), ShapeError);
}

TEST(Forward, ZeroWeightsUniform) {
  const auto p = forward_clean(zero_model(3, 4, 5), std::vector<double>{1, 2, 3});
  for (double x : p) EXPECT_DOUBLE_EQ(x, 0.2);
}

TEST(Forward, ShiftedOutputRowDominates) {
  TaggerModel m = zero_model(3, 4, 5);
  for (double& b : m.b1) b = 1.0;
  for (double& x : m.u.row(2)) x += 10.0;
  const auto p = forward_clean(m, std::vector<double>{0.5, -1, 2});
  EXPECT_GT(p[2], 1 - 1e-12);
}

TEST(Forward, TinyModelMatchesIndependentForward) {
  TaggerModel m = zero_model(2, 2, 2);
  m.w1(0, 0) = 0.5;
  m.w1(0, 1) = -1.0;
  m.w1(1, 0) = 0.25;
  m.w1(1, 1) = 2.0;
  m.b1 = {0.1, -0.2};
  m.u(0, 0) = 1.5;
  m.u(0, 1) = -0.5;
  m.u(1, 0) = -1.0;
  m.u(1, 1) = 0.75;
  m.b_out = {0.05, -0.05};
  const std::vector<double> x = {0.3, -0.7};
  // Hand evaluation.
  const double h0 = std::tanh(0.5 * 0.3 + 1.0 * 0.7 + 0.1);
  const double h1 = std::tanh(0.25 * 0.3 - 2.0 * 0.7 - 0.2);
  const double z0 = 1.5 * h0 - 0.5 * h1 + 0.05, z1 = -1.0 * h0 + 0.75 * h1 - 0.05;
  const double p0 = 1.0 / (1.0 + std::exp(z1 - z0));
  const auto p = forward_clean(m, x);
  EXPECT_NEAR(p[0], p0, 1e-15);
  EXPECT_NEAR(p[1], 1 - p0, 1e-15);
  const auto o = oracle::clean_probs(m, x);
  EXPECT_NEAR(p[0], o[0], 1e-15);
  EXPECT_THROW(forward_clean(m, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(ForwardNoisy, IdentityUniformAndHandExample) {
  TaggerModel m = zero_model(1, 1, 2);
  m.b_out = {std::log(0.7), std::log(0.3)};
  ConfusionModel cm;
  cm.tagset = TagSet({"X"});
  Instance inst;
  inst.feature = {0.0};
  cm.global = Matrix::identity(2, 1000.0);
  const auto clean = forward_clean(m, inst.feature);
  const auto same = forward_noisy(m, cm, inst);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(same[i], clean[i], 1e-12);
  cm.global = Matrix(2, 2);
  for (double x : forward_noisy(m, cm, inst)) EXPECT_DOUBLE_EQ(x, 0.5);
  cm.global(0, 0) = std::log(0.9);
  cm.global(0, 1) = std::log(0.1);
  cm.global(1, 0) = std::log(0.2);
  cm.global(1, 1) = std::log(0.8);
  const auto q = forward_noisy(m, cm, inst);
  EXPECT_NEAR(q[0], 0.69, 1e-12);
  EXPECT_NEAR(q[1], 0.31, 1e-12);
}

TEST(Loss, ConfidentModelHasNearZeroLoss) {
  TaggerModel m = zero_model(1, 1, 3);
  m.b_out = {std::log(1 - 1e-9), std::log(0.5e-9), std::log(0.5e-9)};
  std::vector<Instance> batch(4);
  for (auto& i : batch) i.feature = {1.0};
  EXPECT_NEAR(loss_and_grads(m, nullptr, batch).loss, 1e-9, 1e-12);
}

TEST(Loss, DuplicatedBatchSameLossAndGradients) {
  auto f = oracle::random_grad_fixture(7);
  auto doubled = f.batch;
  doubled.insert(doubled.end(), f.batch.begin(), f.batch.end());
  auto a = loss_and_grads(f.model, &f.cm, f.batch);
  auto b = loss_and_grads(f.model, &f.cm, doubled);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  auto ga = gradient_spans(a.grads), gb = gradient_spans(b.grads);
  for (std::size_t s = 0; s < ga.size(); ++s)
    for (std::size_t i = 0; i < ga[s].size(); ++i) EXPECT_NEAR(ga[s][i], gb[s][i], 1e-14);
}

TEST(Loss, LossMatchesIndependentOracle) {
  const auto f = oracle::random_grad_fixture(11);
  EXPECT_NEAR(loss_and_grads(f.model, &f.cm, f.batch).loss,
              oracle::batch_loss(f.model, &f.cm, f.batch), 1e-12);
}

TEST(Gradients, FiniteDifferencesClusterIp) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto f = oracle::random_grad_fixture(seed);
    const auto r = oracle::check_gradients(f.model, f.cm, f.batch);
    EXPECT_LT(r.worst_relative, 1e-4) << "seed " << seed;
    EXPECT_EQ(r.coordinates, 8 * 30 + 8 + 5 * 8 + 5 + 3 * 25);
  }
}

TEST(Gradients, FiniteDifferencesOtherModes) {
  for (auto mode : {NoiseMode::kGlobal, NoiseMode::kCluster, NoiseMode::kClusterFreqIp}) {
    auto f = oracle::random_grad_fixture(5);
    f.cm.mode = mode;
    if (mode == NoiseMode::kClusterFreqIp) f.cm.selected = {1};  // group 0 falls back
    if (mode == NoiseMode::kGlobal) f.cm.groups.clear();
    EXPECT_LT(oracle::check_gradients(f.model, f.cm, f.batch).worst_relative, 1e-4)
        << to_string(mode);
  }
  const auto f = oracle::random_grad_fixture(6);
  EXPECT_LT(oracle::check_gradients(f.model, std::nullopt, f.batch).worst_relative, 1e-4);
}

TEST(Nadam, ZeroGradientLeavesParameters) {
  std::vector<double> p = {1.0, -2.0}, g = {0.0, 0.0};
  NadamState st;
  for (int i = 0; i < 10; ++i) nadam_step({p}, {g}, st, {});
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
}

TEST(Nadam, FirstStepClosedForm) {
  const NadamConfig cfg;
  for (double g0 : {0.3, -2.0, 1e-3}) {
    std::vector<double> p = {0.0}, g = {g0};
    NadamState st;
    nadam_step({p}, {g}, st, cfg);
    // m_hat = g, v_hat = g^2, Nesterov term (b1 + 1) g.
    const double want = -cfg.learning_rate * (1 + cfg.beta1) * g0 / (std::abs(g0) + cfg.epsilon);
    EXPECT_NEAR(p[0], want, 1e-15);
    EXPECT_LT(p[0] * g0, 0.0);
  }
}

TEST(Nadam, SecondStepClosedForm) {
  const NadamConfig cfg;
  const double g1 = 0.5, g2 = -0.25, b1 = cfg.beta1, b2 = cfg.beta2;
  std::vector<double> p = {0.0};
  NadamState st;
  std::vector<double> g = {g1};
  nadam_step({p}, {g}, st, cfg);
  const double after1 = p[0];
  g[0] = g2;
  nadam_step({p}, {g}, st, cfg);
  const double m = b1 * (1 - b1) * g1 + (1 - b1) * g2;
  const double v = b2 * (1 - b2) * g1 * g1 + (1 - b2) * g2 * g2;
  const double bc1 = 1 - b1 * b1, bc2 = 1 - b2 * b2;
  const double step = cfg.learning_rate * (b1 * m / bc1 + (1 - b1) * g2 / bc1) /
                      (std::sqrt(v / bc2) + cfg.epsilon);
  EXPECT_NEAR(p[0], after1 - step, 1e-15);
}

TEST(Nadam, ScaleInvariantFirstStep) {
  std::vector<double> a = {0.0}, b = {0.0}, ga = {0.01}, gb = {0.1};
  NadamState sa, sb;
  nadam_step({a}, {ga}, sa, {});
  nadam_step({b}, {gb}, sb, {});
  EXPECT_LT(std::abs(a[0] - b[0]) / std::abs(a[0]), 0.01);
}

TEST(Nadam, ShapeMismatch) {
  std::vector<double> p = {0.0}, g = {0.0, 1.0};
  NadamState st;
  EXPECT_THROW(nadam_step({p}, {g}, st, {}), ShapeError);
}

TEST(Train, ZeroEpochsReturnsInitializedModel) {
  TinySetup s;
  s.cfg.epochs = 0;
  const auto r = train(s.data.clean, s.data.noisy, s.data.dev, std::nullopt, s.ctx, s.cfg,
                       TrainingMode::kBase);
  EXPECT_TRUE(r.log.empty());
  std::mt19937_64 rng(s.cfg.seed);
  const auto init = init_tagger(3 * s.data.embeddings.dim(), s.cfg.hidden, 5, 1, rng);
  EXPECT_EQ(r.model, init);
}

TEST(Train, BaseIgnoresNoisyData) {
  TinySetup s;
  const Corpus empty{{}, CorpusRole::kNoisy};
  const auto a =
      train(s.data.clean, s.data.noisy, s.data.dev, std::nullopt, s.ctx, s.cfg, TrainingMode::kBase);
  const auto b =
      train(s.data.clean, empty, s.data.dev, std::nullopt, s.ctx, s.cfg, TrainingMode::kBase);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.batch_losses, b.batch_losses);
}

TEST(Train, DeterministicForSeed) {
  TinySetup s;
  const auto cm = s.model(NoiseMode::kGlobal, std::nullopt);
  const auto a = train(s.data.clean, s.data.noisy, s.data.dev, cm, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  const auto b = train(s.data.clean, s.data.noisy, s.data.dev, cm, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.batch_losses, b.batch_losses);
  EXPECT_EQ(a.confusion->global, b.confusion->global);
}

TEST(Train, ClusterIpWithLambdaOneEqualsGlobal) {
  TinySetup s;
  const auto global = s.model(NoiseMode::kGlobal, std::nullopt);
  const auto ip = s.model(NoiseMode::kClusterIp, 1.0);
  ASSERT_FALSE(ip.groups.empty());
  const auto a = train(s.data.clean, s.data.noisy, s.data.dev, global, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  const auto b = train(s.data.clean, s.data.noisy, s.data.dev, ip, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  ASSERT_EQ(a.batch_losses.size(), b.batch_losses.size());
  for (std::size_t i = 0; i < a.batch_losses.size(); ++i)
    EXPECT_NEAR(a.batch_losses[i], b.batch_losses[i], 1e-12) << "batch " << i;
}

TEST(Train, FrozenNoiseLayerKeepsInitialization) {
  TinySetup s;
  s.cfg.train_noise_layer = false;
  const auto cm = s.model(NoiseMode::kGlobal, std::nullopt);
  const auto r = train(s.data.clean, s.data.noisy, s.data.dev, cm, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  EXPECT_EQ(r.confusion->global, cm.global);
}

TEST(Train, RequiresConfusionModelForNoiseLayer) {
  TinySetup s;
  EXPECT_THROW(train(s.data.clean, s.data.noisy, s.data.dev, std::nullopt, s.ctx, s.cfg,
                     TrainingMode::kNoiseLayer),
               ConfigError);
}

TEST(Train, EarlyStoppingHonoursPatience) {
  TinySetup s;
  s.cfg.epochs = 40;
  s.cfg.patience = 2;
  const auto r =
      train(s.data.clean, s.data.noisy, s.data.dev, std::nullopt, s.ctx, s.cfg, TrainingMode::kBase);
  if (r.log.size() < 40) EXPECT_EQ(r.log.size(), r.best_epoch + 2);
  double best = -1;
  for (const auto& e : r.log) best = std::max(best, e.dev_f1);
  EXPECT_DOUBLE_EQ(best, r.best_dev_f1);
}

TEST(Checkpoint, RoundTrip) {
  TinySetup s;
  const auto cm = s.model(NoiseMode::kClusterIp, 0.3);
  const auto r = train(s.data.clean, s.data.noisy, s.data.dev, cm, s.ctx, s.cfg,
                       TrainingMode::kNoiseLayer);
  const auto j = nlohmann::json::parse(checkpoint_to_json(r, s.data.tagset).dump());
  const Checkpoint c = checkpoint_from_json(j);
  EXPECT_EQ(c.tagset, s.data.tagset);
  EXPECT_EQ(c.result.model, r.model);
  EXPECT_EQ(c.result.optimizer, r.optimizer);
  ASSERT_TRUE(c.result.confusion.has_value());
  EXPECT_EQ(c.result.confusion->groups, r.confusion->groups);
  EXPECT_EQ(predict(c.result.model, s.data.test, s.ctx), predict(r.model, s.data.test, s.ctx));
}

TEST(Predict, OutputsIob2Tags) {
  TinySetup s;
  const auto r =
      train(s.data.clean, s.data.noisy, s.data.dev, std::nullopt, s.ctx, s.cfg, TrainingMode::kBase);
  const Corpus pred = predict(r.model, s.data.test, s.ctx);
  ASSERT_EQ(pred.sentences.size(), s.data.test.sentences.size());
  for (const auto& sent : pred.sentences) {
    ASSERT_TRUE(sent.tags.has_value());
    EXPECT_EQ(*sent.tags, io_to_iob2(iob2_to_io(*sent.tags)));
  }
}
