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

// Synthetic corpora with cluster-dependent label noise, and the driver that
// runs model variants over several seeds on them.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisecm/clustering.hpp"
#include "noisecm/corpus.hpp"
#include "noisecm/distant_supervision.hpp"
#include "noisecm/embeddings.hpp"
#include "noisecm/error.hpp"
#include "noisecm/evaluation.hpp"
#include "noisecm/noise_model.hpp"
#include "noisecm/pipeline.hpp"
#include "noisecm/tagger.hpp"

namespace noisecm {

struct LatentCluster {
  std::string name;
  Matrix noise;  // k x k row-stochastic, p(noisy | clean)
  std::size_t words_per_type = 100;
  std::size_t outside_words = 100;
  double weight = 1.0;  // relative share of sentences drawn from this cluster
};

struct SyntheticSpec {
  std::vector<std::string> entity_types = default_entity_types();
  std::vector<LatentCluster> clusters;
  std::size_t min_length = 4;
  std::size_t max_length = 8;
  double entity_rate = 0.3;    // chance that a free slot starts an entity
  double two_token_rate = 0.2; // chance that an entity spans two tokens
  std::size_t clean_sentences = 200;
  std::size_t noisy_sentences = 5000;
  std::size_t dev_sentences = 200;
  std::size_t test_sentences = 500;
  std::size_t embedding_dim = 32;
  double separation = 10.0;  // distance of cluster centers from the origin
  double spread = 1.0;       // per-coordinate std dev around the center
  double gazetteer_coverage = 0.4;
  double gazetteer_error = 0.05;
  std::uint64_t seed = 1;
};

// Two clusters with diverging noise on top of a shared ORG -> O miss rate:
// in cluster A most PER mentions are missed (PER -> O), in cluster B most
// LOC mentions are labeled PER.
inline SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  const TagSet tags(spec.entity_types);
  const std::size_t k = tags.size();
  const std::size_t O = 0, PER = tags.index(Tag::inside("PER")),
                    LOC = tags.index(Tag::inside("LOC")), ORG = tags.index(Tag::inside("ORG"));
  auto base = [&] {
    Matrix m = Matrix::identity(k);
    m(ORG, ORG) = 0.4;
    m(ORG, O) = 0.6;
    return m;
  };
  LatentCluster a{"A", base()};
  a.noise(PER, PER) = 0.2;
  a.noise(PER, O) = 0.8;
  LatentCluster b{"B", base()};
  b.noise(LOC, LOC) = 0.2;
  b.noise(LOC, PER) = 0.8;
  spec.clusters = {a, b};
  return spec;
}

inline void validate(const SyntheticSpec& spec) {
  const std::size_t k = spec.entity_types.size() + 1;
  if (spec.clusters.empty()) throw ConfigError("synthetic spec needs at least one cluster");
  if (spec.min_length == 0 || spec.min_length > spec.max_length)
    throw ConfigError("bad sentence length range");
  if (spec.embedding_dim < spec.clusters.size())
    throw ConfigError("embedding dimension must be at least the cluster count");
  if (spec.clean_sentences == 0 || spec.dev_sentences == 0 || spec.test_sentences == 0)
    throw ConfigError("clean, dev and test sizes must be positive");
  for (const auto& c : spec.clusters) {
    if (c.noise.rows() != k || c.noise.cols() != k)
      throw ConfigError("cluster " + c.name + ": noise matrix must be " + std::to_string(k) +
                        "x" + std::to_string(k));
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (c.noise(i, j) < 0.0) throw ConfigError("cluster " + c.name + ": negative entry");
        s += c.noise(i, j);
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw ConfigError("cluster " + c.name + ": noise row " + std::to_string(i) +
                          " does not sum to 1");
    }
    if (c.words_per_type == 0 || c.outside_words == 0 || !(c.weight > 0.0))
      throw ConfigError("cluster " + c.name + ": empty vocabulary or weight");
  }
}

struct SyntheticData {
  TagSet tagset;
  Corpus clean;        // gold tags
  Corpus clean_noisy;  // the same sentences with corrupted tags (label pairs)
  Corpus noisy;        // corrupted tags
  Corpus noisy_truth;  // the same sentences with their true tags
  Corpus dev;
  Corpus test;
  WordClustering clusters;  // true latent clusters
  EmbeddingTable embeddings;
  Gazetteer gazetteer;
};

inline std::string synthetic_word(std::size_t cluster, const std::string& tag, std::size_t i) {
  std::string name = "c" + std::to_string(cluster) + "_" + tag + "_" + std::to_string(i);
  for (char& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return name;
}

// Fully determined by spec.seed.
inline SyntheticData generate(const SyntheticSpec& spec) {
  validate(spec);
  SyntheticData data;
  data.tagset = TagSet(spec.entity_types);
  const std::size_t k = data.tagset.size();
  const std::size_t n_clusters = spec.clusters.size();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, spec.spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Vocabulary, embeddings and true clusters. vocab[c][tag] lists words.
  data.clusters = WordClustering(n_clusters);
  data.embeddings = EmbeddingTable(spec.embedding_dim);
  std::vector<std::vector<std::vector<std::string>>> vocab(n_clusters,
                                                           std::vector<std::vector<std::string>>(k));
  for (std::size_t c = 0; c < n_clusters; ++c) {
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t n = t == 0 ? spec.clusters[c].outside_words : spec.clusters[c].words_per_type;
      const std::string tag = t == 0 ? "o" : spec.entity_types[t - 1];
      for (std::size_t i = 0; i < n; ++i) {
        const std::string w = synthetic_word(c, tag, i);
        std::vector<double> v(spec.embedding_dim);
        for (double& x : v) x = gauss(rng);
        v[c] += spec.separation;
        data.embeddings.add(w, std::move(v));
        data.clusters.set(w, c);
        vocab[c][t].push_back(w);
      }
    }
  }

  // Gazetteer: a fraction of entity words under their type, a few under a
  // wrong one.
  for (std::size_t c = 0; c < n_clusters; ++c)
    for (std::size_t t = 1; t < k; ++t)
      for (const auto& w : vocab[c][t]) {
        const double r = unit(rng);
        if (r < spec.gazetteer_coverage) {
          data.gazetteer.add({w}, spec.entity_types[t - 1]);
        } else if (r < spec.gazetteer_coverage + spec.gazetteer_error && k > 2) {
          std::size_t wrong = 1 + static_cast<std::size_t>(unit(rng) * double(k - 2));
          if (wrong >= t) ++wrong;
          data.gazetteer.add({w}, spec.entity_types[std::min(wrong, k - 1) - 1]);
        }
      }

  std::vector<double> weights;
  for (const auto& c : spec.clusters) weights.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick_cluster(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_len(spec.min_length, spec.max_length);
  std::uniform_int_distribution<std::size_t> pick_type(1, k - 1);

  // One sentence: every token comes from the sentence's cluster; entities
  // are followed by an O token so IO spans stay unambiguous.
  auto sentence = [&](std::size_t& cluster) {
    cluster = pick_cluster(rng);
    const std::size_t len = pick_len(rng);
    Sentence s;
    s.tags.emplace();
    auto emit = [&](std::size_t t) {
      const auto& words = vocab[cluster][t];
      s.tokens.push_back(words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)]);
      s.tags->push_back(data.tagset.tag(t));
    };
    while (s.size() < len) {
      if (unit(rng) < spec.entity_rate) {
        const std::size_t t = pick_type(rng);
        emit(t);
        if (s.size() < len && unit(rng) < spec.two_token_rate) emit(t);
        if (s.size() < len) emit(0);
      } else {
        emit(0);
      }
    }
    return s;
  };

  auto corrupt = [&](const Sentence& s, std::size_t cluster) {
    Sentence out = s;
    const Matrix& m = spec.clusters[cluster].noise;
    for (auto& tag : *out.tags) {
      const std::size_t i = data.tagset.index(tag);
      double r = unit(rng);
      std::size_t j = 0;
      for (; j + 1 < k; ++j) {
        r -= m(i, j);
        if (r < 0.0) break;
      }
      tag = data.tagset.tag(j);
    }
    return out;
  };

  auto make = [&](std::size_t n, CorpusRole role, Corpus* corrupted, Corpus* truth) {
    Corpus c{{}, role};
    if (corrupted) *corrupted = Corpus{{}, CorpusRole::kNoisy};
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cluster = 0;
      Sentence s = sentence(cluster);
      if (corrupted) corrupted->sentences.push_back(corrupt(s, cluster));
      c.sentences.push_back(std::move(s));
    }
    if (truth) *truth = c;
    return c;
  };

  data.clean = make(spec.clean_sentences, CorpusRole::kClean, &data.clean_noisy, nullptr);
  make(spec.noisy_sentences, CorpusRole::kNoisy, &data.noisy, &data.noisy_truth);
  data.noisy_truth.role = CorpusRole::kClean;
  data.dev = make(spec.dev_sentences, CorpusRole::kTest, nullptr, nullptr);
  data.test = make(spec.test_sentences, CorpusRole::kTest, nullptr, nullptr);
  return data;
}

// ---------------------------------------------------------------------------
// Experiment driver

// The synthetic words carry no contextual signal, so the default window is
// 0; the noisy stream gets four batches per clean batch.
inline TrainConfig default_benchmark_training() {
  TrainConfig t;
  t.epochs = 50;
  t.noisy_ratio = 4;
  return t;
}

struct ExperimentConfig {
  TrainConfig train = default_benchmark_training();
  std::size_t window = 0;
  std::size_t pca_dim = 50;
};

struct RunResult {
  std::string variant;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double dev_f1 = 0.0;
  std::size_t best_epoch = 0;
};

struct TrendRow {
  std::string variant;
  std::vector<double> f1;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct TrendReport {
  std::vector<TrendRow> rows;
  std::vector<RunResult> runs;

  const TrendRow& row(const std::string& variant) const {
    for (const auto& r : rows)
      if (r.variant == variant) return r;
    throw ConfigError("no row for variant " + variant);
  }
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

// Sample standard deviation over sqrt(n).
inline double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1)) / std::sqrt(double(v.size()));
}

// Cluster -> initialize -> train -> score for one variant on one data set.
inline RunResult run_variant(const SyntheticData& data, const ModelVariant& variant,
                             const ExperimentConfig& cfg, std::uint64_t seed) {
  WordClustering clusters(0);
  if (variant.clusters == ClusterMethod::kKMeans) {
    const auto words = corpus_vocabulary({&data.clean, &data.noisy});
    clusters = kmeans_words(words, data.embeddings,
                            {variant.num_clusters, cfg.pca_dim, false, 100, seed});
  } else if (variant.clusters == ClusterMethod::kBrown) {
    Corpus text = strip_tags(data.clean);
    for (const auto& s : data.noisy.sentences) text.sentences.push_back({s.tokens, std::nullopt});
    clusters = brown_cluster(text, variant.num_clusters);
  } else if (variant.clusters == ClusterMethod::kGiven) {
    clusters = data.clusters;
  }

  std::optional<ConfusionModel> cm;
  if (variant.training == TrainingMode::kNoiseLayer) {
    const auto pairs = zip_pairs(data.clean, data.clean_noisy);
    const auto sizes = count_groups({&data.clean, &data.noisy}, clusters);
    cm = build_model(pairs, clusters, variant.noise, data.tagset, sizes);
  }

  FeatureContext ctx{&data.embeddings, &clusters, data.tagset, cfg.window, OovPolicy::kZero};
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  const TrainResult tr = train(data.clean, data.noisy, data.dev, cm, ctx, tc, variant.training);
  const Corpus pred = predict(tr.model, data.test, ctx);
  return {variant.name, seed, score(data.test, pred).f1(), tr.best_dev_f1, tr.best_epoch};
}

// Every (variant, seed) pair regenerates the data with that seed and runs
// the full pipeline. Failures are rethrown naming the pair.
inline TrendReport run_matrix_experiment(const SyntheticSpec& spec,
                                         const std::vector<ModelVariant>& variants,
                                         const std::vector<std::uint64_t>& seeds,
                                         const ExperimentConfig& cfg = {}) {
  if (seeds.size() < 3) throw ConfigError("a trend report needs at least 3 seeds");
  TrendReport report;
  std::map<std::string, std::vector<double>> scores;
  for (std::uint64_t seed : seeds) {
    SyntheticSpec s = spec;
    s.seed = seed;
    const SyntheticData data = generate(s);
    for (const auto& v : variants) {
      try {
        const RunResult r = run_variant(data, v, cfg, seed);
        scores[v.name].push_back(r.f1);
        report.runs.push_back(r);
      } catch (const Error& e) {
        throw Error("variant " + v.name + ", seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  }
  for (const auto& v : variants) {
    const auto& f = scores[v.name];
    report.rows.push_back({v.name, f, mean_of(f), standard_error(f)});
  }
  return report;
}

inline std::string render_text(const TrendReport& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %8s %8s %6s\n", "variant", "F1", "stderr", "runs");
  out += buf;
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%-24s %8.1f %8.1f %6zu\n", row.variant.c_str(), row.mean,
                  row.stderr_, row.f1.size());
    out += buf;
  }
  return out;
}

inline nlohmann::json to_json(const TrendReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"variant", row.variant},
                    {"f1", row.f1},
                    {"mean", row.mean},
                    {"stderr", row.stderr_}});
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"variant", run.variant},
                    {"seed", run.seed},
                    {"f1", run.f1},
                    {"dev_f1", run.dev_f1},
                    {"best_epoch", run.best_epoch}});
  return {{"format", "noisecm.trend"}, {"version", 1}, {"rows", rows}, {"runs", runs}};
}

// Spec file (JSON). Missing keys keep their defaults; "default" clusters
// come from default_synthetic_spec().
inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s = default_synthetic_spec();
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("entity_types", s.entity_types);
    get("min_length", s.min_length);
    get("max_length", s.max_length);
    get("entity_rate", s.entity_rate);
    get("two_token_rate", s.two_token_rate);
    get("clean_sentences", s.clean_sentences);
    get("noisy_sentences", s.noisy_sentences);
    get("dev_sentences", s.dev_sentences);
    get("test_sentences", s.test_sentences);
    get("embedding_dim", s.embedding_dim);
    get("separation", s.separation);
    get("spread", s.spread);
    get("gazetteer_coverage", s.gazetteer_coverage);
    get("gazetteer_error", s.gazetteer_error);
    get("seed", s.seed);
    if (j.contains("clusters")) {
      s.clusters.clear();
      const std::size_t k = s.entity_types.size() + 1;
      for (const auto& c : j.at("clusters")) {
        LatentCluster lc;
        lc.name = c.value("name", "cluster" + std::to_string(s.clusters.size()));
        lc.noise = matrix_from_json(c.at("noise"), k, k);
        lc.words_per_type = c.value("words_per_type", lc.words_per_type);
        lc.outside_words = c.value("outside_words", lc.outside_words);
        lc.weight = c.value("weight", lc.weight);
        s.clusters.push_back(std::move(lc));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic spec JSON: ") + e.what());
  }
  validate(s);
  return s;
}

inline nlohmann::json to_json(const SyntheticSpec& s) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : s.clusters)
    clusters.push_back({{"name", c.name},
                        {"noise", matrix_to_json(c.noise)},
                        {"words_per_type", c.words_per_type},
                        {"outside_words", c.outside_words},
                        {"weight", c.weight}});
  return {{"entity_types", s.entity_types},
          {"clusters", clusters},
          {"min_length", s.min_length},
          {"max_length", s.max_length},
          {"entity_rate", s.entity_rate},
          {"two_token_rate", s.two_token_rate},
          {"clean_sentences", s.clean_sentences},
          {"noisy_sentences", s.noisy_sentences},
          {"dev_sentences", s.dev_sentences},
          {"test_sentences", s.test_sentences},
          {"embedding_dim", s.embedding_dim},
          {"separation", s.separation},
          {"spread", s.spread},
          {"gazetteer_coverage", s.gazetteer_coverage},
          {"gazetteer_error", s.gazetteer_error},
          {"seed", s.seed}};
}

}  // namespace noisecm
