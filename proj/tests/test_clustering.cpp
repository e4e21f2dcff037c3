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
#include <sstream>

#include "noisecm.hpp"
#include "oracles.hpp"

using namespace noisecm;

namespace {

Matrix blobs(std::size_t per_blob, double separation, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(2 * per_blob, 2);
  for (std::size_t i = 0; i < 2 * per_blob; ++i) {
    const double cx = i < per_blob ? 0.0 : separation;
    m(i, 0) = cx + g(rng);
    m(i, 1) = g(rng);
  }
  return m;
}

Corpus text(const std::vector<std::string>& sentences) {
  Corpus c{{}, CorpusRole::kUnlabeled};
  for (const auto& s : sentences) c.sentences.push_back({noisecm::detail::split_ws(s), std::nullopt});
  return c;
}

double objective(const Matrix& pts, const KMeansState& s) {
  double total = 0;
  for (std::size_t i = 0; i < pts.rows(); ++i)
    for (std::size_t j = 0; j < pts.cols(); ++j) {
      const double d = pts(i, j) - s.centroids(s.assignments[i], j);
      total += d * d;
    }
  return total;
}

}  // namespace

TEST(WordClusteringTest, AssignAndOov) {
  WordClustering c(3);
  c.set("Paris", 2);
  EXPECT_EQ(assign(c, "Paris"), 2u);
  EXPECT_EQ(assign(c, "London"), c.oov_id());
  EXPECT_EQ(assign(c, "paris"), c.oov_id());
  EXPECT_THROW(c.set("x", 3), ConfigError);
}

TEST(WordClusteringTest, TsvRoundTrip) {
  WordClustering c(2);
  c.set("b", 1);
  c.set("a", 0);
  std::stringstream s;
  write_clusters(s, c);
  EXPECT_EQ(s.str(), "a\t0\nb\t1\n");
  const WordClustering back = read_clusters(s);
  EXPECT_EQ(back.num_clusters(), 2u);
  EXPECT_EQ(back.map(), c.map());
}

TEST(KMeans, SingleClusterIsMean) {
  const Matrix pts = blobs(10, 5.0, 1);
  const auto st = kmeans(pts, 1);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < pts.rows(); ++i) mean += pts(i, j);
    EXPECT_NEAR(st.centroids(0, j), mean / double(pts.rows()), 1e-12);
  }
}

TEST(KMeans, TwoBlobsRecoveredExactly) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Matrix pts = blobs(20, 10.0, seed);
    const auto st = kmeans(pts, 2, {100, seed});
    // Brute force over both labelings: blob membership must match one.
    std::size_t agree = 0, flipped = 0;
    for (std::size_t i = 0; i < 40; ++i) {
      const std::size_t truth = i < 20 ? 0 : 1;
      agree += st.assignments[i] == truth;
      flipped += st.assignments[i] == 1 - truth;
    }
    EXPECT_TRUE(agree == 40 || flipped == 40) << "seed " << seed;
    // Every point sits at its nearest centroid.
    for (std::size_t i = 0; i < 40; ++i) {
      const double own = squared_distance(pts.row(i), st.centroids.row(st.assignments[i]));
      const double other = squared_distance(pts.row(i), st.centroids.row(1 - st.assignments[i]));
      EXPECT_LE(own, other);
    }
  }
}

TEST(KMeans, OneClusterPerDistinctPoint) {
  Matrix pts(5, 2);
  for (std::size_t i = 0; i < 5; ++i) pts(i, 0) = double(i * i);
  const auto st = kmeans(pts, 5);
  EXPECT_NEAR(st.objective, 0.0, 1e-12);
  std::set<std::size_t> ids(st.assignments.begin(), st.assignments.end());
  EXPECT_EQ(ids.size(), 5u);
}

TEST(KMeans, TooFewDistinctPoints) {
  Matrix pts(4, 2);  // all zero
  EXPECT_THROW(kmeans(pts, 2), ConfigError);
}

TEST(KMeans, ObjectiveNonIncreasingOnRandomInstances) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> n_dist(20, 60), p_dist(2, 8), d_dist(1, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = n_dist(rng), p = p_dist(rng), d = d_dist(rng);
    Matrix pts(n, d);
    for (double& x : pts.data()) x = g(rng);
    const auto full = kmeans(pts, p, {100, std::uint64_t(inst)});
    EXPECT_TRUE(oracle::objective_non_increasing(full)) << "instance " << inst;
    // Recompute the objective after each iteration independently.
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= full.iterations; ++it) {
      const auto st = kmeans(pts, p, {it, std::uint64_t(inst)});
      const double obj = objective(pts, st);
      EXPECT_LE(obj, prev * (1 + 1e-12)) << "instance " << inst << " iteration " << it;
      EXPECT_NEAR(obj, full.history[it - 1], 1e-9 * std::max(1.0, obj));
      prev = obj;
    }
  }
}

TEST(KMeans, DeterministicForSeed) {
  const Matrix pts = blobs(15, 3.0, 8);
  const auto a = kmeans(pts, 3, {100, 4});
  const auto b = kmeans(pts, 3, {100, 4});
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(Ami, IndependentMatchesClosedForm) {
  Matrix counts(2, 2);
  counts(0, 0) = 3;
  counts(1, 1) = 1;
  // p(0,0)=.75, p(1,1)=.25, marginals equal: AMI = .75 ln(1/.75) + .25 ln(1/.25)
  EXPECT_NEAR(average_mutual_information(counts),
              0.75 * std::log(1 / 0.75) + 0.25 * std::log(4.0), 1e-12);
}

TEST(Brown, SingletonsWhenPEqualsVocab) {
  const Corpus c = text({"a b c", "b c a"});
  BrownClusterer b(c, {3, std::numeric_limits<std::size_t>::max(), 0});
  EXPECT_TRUE(b.finished());
  const auto r = b.result();
  std::set<ClusterId> ids;
  for (const auto& [w, id] : r.map()) ids.insert(id);
  EXPECT_EQ(ids.size(), 3u);
}

TEST(Brown, SingleCluster) {
  const auto r = brown_cluster(text({"a b c d", "d c b a e"}), 1);
  for (const auto& [w, id] : r.map()) EXPECT_EQ(id, 0u);
  EXPECT_EQ(r.vocabulary_size(), 5u);
}

TEST(Brown, IdenticalContextsMergeFirst) {
  // u and v share left context "x" and right context "y".
  const Corpus c = text({"x u y", "x v y", "x u y", "x v y", "a b", "b a", "a x"});
  BrownClusterer b(c, {1, std::numeric_limits<std::size_t>::max(), 0});
  const auto& vocab = b.vocabulary();
  const auto want = oracle::best_brown_merge(b);
  const auto got = b.step();
  EXPECT_EQ(got.kept, want.kept);
  EXPECT_EQ(got.merged, want.merged);
  std::set<std::string> merged = {vocab[got.kept], vocab[got.merged]};
  EXPECT_EQ(merged, (std::set<std::string>{"u", "v"}));
}

TEST(Brown, MatchesExhaustiveOracleEveryStep) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t vocab = 6 + std::size_t(trial % 7);  // 6..12
    const Corpus c = oracle::random_text(rng, vocab, 25);
    for (std::size_t p : {1, 2, 3}) {
      EXPECT_EQ(oracle::brown_mismatches(c, p, 0), 0u) << "trial " << trial << " p " << p;
      // Small window: words enter one at a time.
      EXPECT_EQ(oracle::brown_mismatches(c, p, p + 1), 0u) << "trial " << trial << " p " << p;
    }
  }
}

TEST(Brown, IncrementalAmiMatchesRecomputed) {
  std::mt19937_64 rng(3);
  const Corpus c = oracle::random_text(rng, 12, 40);
  BrownClusterer b(c, {2, std::numeric_limits<std::size_t>::max(), 4});
  while (!b.finished()) {
    const auto m = b.step();
    std::map<std::size_t, std::size_t> cluster_of;
    const auto clusters = b.clusters();
    for (std::size_t z = 0; z < clusters.size(); ++z)
      for (auto r : clusters[z]) cluster_of[r] = z;
    EXPECT_NEAR(m.ami_after, oracle::ami_of_partition(b.bigrams(), cluster_of), 1e-9);
  }
}

TEST(Brown, VocabCapLeavesRareWordsOov) {
  const auto r = brown_cluster(text({"a a a b b c", "a b"}), 1, 2);
  EXPECT_EQ(r.vocabulary_size(), 2u);
  EXPECT_EQ(r.assign("c"), r.oov_id());
}

TEST(Brown, Errors) {
  EXPECT_THROW(brown_cluster(text({"a b"}), 3), ConfigError);
  EXPECT_THROW(brown_cluster(Corpus{}, 1), ConfigError);
}
