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

// Model variants named after their table rows (base, base+noise,
// global-cm, global-id-cm, brown-cm / kmeans-cm with -freq, -ip, -freq-ip)
// and the shared cluster -> initialize -> train steps.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "noisecm/clustering.hpp"
#include "noisecm/corpus.hpp"
#include "noisecm/embeddings.hpp"
#include "noisecm/error.hpp"
#include "noisecm/noise_model.hpp"
#include "noisecm/tagger.hpp"

namespace noisecm {

enum class ClusterMethod { kNone, kKMeans, kBrown, kGiven };

struct ModelVariant {
  std::string name;
  TrainingMode training = TrainingMode::kBase;
  NoiseModelOptions noise;  // meaningful for kNoiseLayer only
  ClusterMethod clusters = ClusterMethod::kNone;
  std::size_t num_clusters = 10;
};

struct VariantDefaults {
  double lambda = 0.3;
  double fraction = 0.5;
  std::size_t num_clusters = 10;
};

inline ModelVariant parse_variant(const std::string& name, const VariantDefaults& d = {}) {
  ModelVariant v;
  v.name = name;
  v.num_clusters = d.num_clusters;
  if (name == "base") return v;
  if (name == "base+noise") {
    v.training = TrainingMode::kBaseNoise;
    return v;
  }
  v.training = TrainingMode::kNoiseLayer;
  if (name == "global-cm") {
    v.noise.mode = NoiseMode::kGlobal;
    return v;
  }
  if (name == "global-id-cm") {
    v.noise.mode = NoiseMode::kGlobalIdentity;
    return v;
  }
  std::string rest;
  if (name.rfind("brown-cm", 0) == 0) {
    v.clusters = ClusterMethod::kBrown;
    rest = name.substr(8);
  } else if (name.rfind("kmeans-cm", 0) == 0) {
    v.clusters = ClusterMethod::kKMeans;
    rest = name.substr(9);
  } else if (name.rfind("given-cm", 0) == 0) {
    v.clusters = ClusterMethod::kGiven;
    rest = name.substr(8);
  } else {
    throw ConfigError("unknown model variant '" + name + "'");
  }
  if (rest.empty()) {
    v.noise.mode = NoiseMode::kCluster;
  } else if (rest == "-freq") {
    v.noise.mode = NoiseMode::kClusterFreq;
    v.noise.fraction = d.fraction;
  } else if (rest == "-ip") {
    v.noise.mode = NoiseMode::kClusterIp;
    v.noise.lambda = d.lambda;
  } else if (rest == "-freq-ip") {
    v.noise.mode = NoiseMode::kClusterFreqIp;
    v.noise.fraction = d.fraction;
    v.noise.lambda = d.lambda;
  } else {
    throw ConfigError("unknown model variant '" + name + "'");
  }
  return v;
}

inline std::vector<std::string> corpus_vocabulary(const std::vector<const Corpus*>& corpora) {
  std::set<std::string> words;
  for (const Corpus* c : corpora)
    for (const auto& s : c->sentences) words.insert(s.tokens.begin(), s.tokens.end());
  return {words.begin(), words.end()};
}

struct KMeansClusteringOptions {
  std::size_t num_clusters = 10;
  std::size_t pca_dim = 50;
  bool normalize = false;  // unit-length vectors before PCA
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
};

// k-means over PCA-projected embeddings of `words`; words without a vector
// use the table mean.
inline WordClustering kmeans_words(const std::vector<std::string>& words,
                                   const EmbeddingTable& emb,
                                   const KMeansClusteringOptions& opt) {
  if (words.empty()) throw ConfigError("no words to cluster");
  Matrix raw(words.size(), emb.dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& v = emb.lookup(words[i], OovPolicy::kMean);
    double norm = 1.0;
    if (opt.normalize) {
      norm = std::sqrt(dot(v, v));
      if (norm == 0.0) norm = 1.0;
    }
    for (std::size_t j = 0; j < emb.dim(); ++j) raw(i, j) = v[j] / norm;
  }
  const std::size_t r = std::min({opt.pca_dim, emb.dim(), words.size()});
  const Matrix* points = &raw;
  Matrix projected;
  if (words.size() >= 2 && r < emb.dim()) {
    const PcaTransform pca = fit_pca(raw, r, {1000, 1e-9, opt.seed});
    projected = Matrix(words.size(), r);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto y = project(pca, raw.row(i));
      std::copy(y.begin(), y.end(), projected.row(i).begin());
    }
    points = &projected;
  }
  return kmeans_cluster(words, *points, opt.num_clusters, {opt.max_iter, opt.seed});
}

}  // namespace noisecm
