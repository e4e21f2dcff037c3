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

// Confusion matrices p(noisy | clean): count-based initialization, the
// per-row softmax, largest-group selection, interpolation with the global
// matrix and the noisy-label marginal.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisecm/clustering.hpp"
#include "noisecm/corpus.hpp"
#include "noisecm/distant_supervision.hpp"
#include "noisecm/error.hpp"
#include "noisecm/linalg.hpp"

namespace noisecm {

// k x k logits; row = clean label, column = noisy label.
using ConfusionLogits = Matrix;

enum class NoiseMode {
  kGlobal,
  kGlobalIdentity,
  kCluster,
  kClusterFreq,
  kClusterIp,
  kClusterFreqIp,
};

inline std::string to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::kGlobal: return "global";
    case NoiseMode::kGlobalIdentity: return "global-identity";
    case NoiseMode::kCluster: return "cluster";
    case NoiseMode::kClusterFreq: return "cluster-freq";
    case NoiseMode::kClusterIp: return "cluster-ip";
    case NoiseMode::kClusterFreqIp: return "cluster-freq-ip";
  }
  return "global";
}

inline NoiseMode parse_noise_mode(const std::string& s) {
  for (auto m : {NoiseMode::kGlobal, NoiseMode::kGlobalIdentity, NoiseMode::kCluster,
                 NoiseMode::kClusterFreq, NoiseMode::kClusterIp, NoiseMode::kClusterFreqIp})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown noise mode '" + s + "'");
}

inline bool is_cluster_mode(NoiseMode m) {
  return m != NoiseMode::kGlobal && m != NoiseMode::kGlobalIdentity;
}
inline bool uses_selection(NoiseMode m) {
  return m == NoiseMode::kClusterFreq || m == NoiseMode::kClusterFreqIp;
}
inline bool uses_interpolation(NoiseMode m) {
  return m == NoiseMode::kClusterIp || m == NoiseMode::kClusterFreqIp;
}

struct ConfusionModel {
  TagSet tagset;
  NoiseMode mode = NoiseMode::kGlobal;
  ConfusionLogits global;
  std::map<ClusterId, ConfusionLogits> groups;  // only groups with their own matrix
  double lambda = 0.0;                          // weight of the global matrix
  std::set<ClusterId> selected;

  std::size_t k() const { return tagset.size(); }
};

// Count-based logits with additive smoothing alpha:
//   b_ij = log((n_ij + alpha) / (n_i + k * alpha)).
// Rows never seen on the clean side are uniform.
inline ConfusionLogits init_logits(const std::vector<LabeledPair>& pairs, const TagSet& tagset,
                                   double alpha = 1e-6) {
  if (!(alpha > 0.0)) throw ConfigError("smoothing alpha must be positive");
  const std::size_t k = tagset.size();
  Matrix counts(k, k);
  for (const auto& p : pairs) counts(tagset.index(p.clean), tagset.index(p.noisy)) += 1.0;
  ConfusionLogits b(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) row += counts(i, j);
    for (std::size_t j = 0; j < k; ++j)
      b(i, j) = row > 0.0 ? std::log((counts(i, j) + alpha) / (row + double(k) * alpha))
                          : std::log(1.0 / double(k));
  }
  return b;
}

inline Matrix row_softmax(const ConfusionLogits& logits) {
  Matrix out = logits;
  for (std::size_t i = 0; i < out.rows(); ++i) softmax_inplace(out.row(i));
  return out;
}

// Ids of the ceil(fraction * p) largest groups; ties go to the lower id.
inline std::set<ClusterId> select_frequent(const std::map<ClusterId, std::size_t>& group_sizes,
                                           double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("selection fraction must lie in (0, 1]");
  std::vector<std::pair<ClusterId, std::size_t>> ranked(group_sizes.begin(), group_sizes.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto n = static_cast<std::size_t>(std::ceil(fraction * double(ranked.size()) - 1e-9));
  std::set<ClusterId> out;
  for (std::size_t i = 0; i < n && i < ranked.size(); ++i) out.insert(ranked[i].first);
  return out;
}

// p(noisy | clean, group): the global matrix for unselected, OOV or
// under-populated groups, otherwise (1 - lambda) * group + lambda * global.
inline Matrix effective_matrix(const ConfusionModel& m, ClusterId group) {
  if (m.mode == NoiseMode::kGlobal || m.mode == NoiseMode::kGlobalIdentity)
    return row_softmax(m.global);
  auto it = m.groups.find(group);
  if (it == m.groups.end() || !m.selected.count(group)) return row_softmax(m.global);
  const double lambda = uses_interpolation(m.mode) ? m.lambda : 0.0;
  Matrix g = row_softmax(it->second);
  if (lambda == 0.0) return g;
  const Matrix glob = row_softmax(m.global);
  for (std::size_t i = 0; i < g.size(); ++i)
    g.data()[i] = (1.0 - lambda) * g.data()[i] + lambda * glob.data()[i];
  return g;
}

// p(noisy = j) = sum_i mat(i, j) * clean(i)
inline std::vector<double> noisy_distribution(std::span<const double> clean, const Matrix& mat) {
  if (mat.rows() != clean.size() || mat.cols() != clean.size())
    throw ShapeError("confusion matrix does not match the class count");
  std::vector<double> out(mat.cols(), 0.0);
  for (std::size_t i = 0; i < mat.rows(); ++i)
    for (std::size_t j = 0; j < mat.cols(); ++j) out[j] += mat(i, j) * clean[i];
  return out;
}

struct NoiseModelOptions {
  NoiseMode mode = NoiseMode::kGlobal;
  std::optional<double> lambda;    // required exactly for the -ip modes
  std::optional<double> fraction;  // required exactly for the -freq modes
  double alpha = 1e-6;
  std::size_t min_pairs = 5;
  double identity_strength = 6.0;
};

// Instance count per real cluster id (0..p-1, zeros included) over any
// number of corpora.
inline std::map<ClusterId, std::size_t> count_groups(const std::vector<const Corpus*>& corpora,
                                                     const WordClustering& clustering) {
  std::map<ClusterId, std::size_t> sizes;
  for (ClusterId id = 0; id < clustering.num_clusters(); ++id) sizes[id] = 0;
  for (const Corpus* c : corpora)
    for (const auto& s : c->sentences)
      for (const auto& t : s.tokens) {
        const ClusterId id = clustering.assign(t);
        if (id != clustering.oov_id()) ++sizes[id];
      }
  return sizes;
}

// Global logits from every pair; for cluster modes, one matrix per
// selected group estimated from that group's pairs. `group_sizes` drives
// the -freq selection and defaults to the pair counts.
inline ConfusionModel build_model(const std::vector<LabeledPair>& pairs,
                                  const WordClustering& clustering, const NoiseModelOptions& opt,
                                  const TagSet& tagset,
                                  std::optional<std::map<ClusterId, std::size_t>> group_sizes =
                                      std::nullopt) {
  const NoiseMode mode = opt.mode;
  if (opt.lambda.has_value() != uses_interpolation(mode))
    throw ConfigError(uses_interpolation(mode) ? "mode " + to_string(mode) + " requires lambda"
                                               : "lambda given for mode " + to_string(mode));
  if (opt.fraction.has_value() != uses_selection(mode))
    throw ConfigError(uses_selection(mode) ? "mode " + to_string(mode) + " requires a fraction"
                                           : "fraction given for mode " + to_string(mode));
  if (opt.lambda && !(*opt.lambda >= 0.0 && *opt.lambda <= 1.0))
    throw ConfigError("lambda must lie in [0, 1]");

  ConfusionModel m;
  m.tagset = tagset;
  m.mode = mode;
  m.lambda = opt.lambda.value_or(0.0);
  m.global = mode == NoiseMode::kGlobalIdentity
                 ? Matrix::identity(tagset.size(), opt.identity_strength)
                 : init_logits(pairs, tagset, opt.alpha);
  if (!is_cluster_mode(mode)) return m;

  std::map<ClusterId, std::vector<LabeledPair>> by_group;
  for (const auto& p : pairs) {
    const ClusterId id = clustering.assign(p.word);
    if (id != clustering.oov_id()) by_group[id].push_back(p);
  }
  if (!group_sizes) {
    group_sizes.emplace();
    for (ClusterId id = 0; id < clustering.num_clusters(); ++id)
      (*group_sizes)[id] = by_group.count(id) ? by_group[id].size() : 0;
  }

  if (uses_selection(mode)) {
    m.selected = select_frequent(*group_sizes, *opt.fraction);
  } else {
    for (const auto& [id, n] : *group_sizes) m.selected.insert(id);
  }
  for (ClusterId id : m.selected) {
    auto it = by_group.find(id);
    if (it == by_group.end() || it->second.size() < opt.min_pairs) continue;
    m.groups.emplace(id, init_logits(it->second, tagset, opt.alpha));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kConfusionFormatVersion = 1;

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) throw ParseError("matrix has wrong row count");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix has wrong column count");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

inline nlohmann::json to_json(const ConfusionModel& m) {
  nlohmann::json j;
  j["format"] = "noisecm.confusion";
  j["version"] = kConfusionFormatVersion;
  j["entity_types"] = m.tagset.entity_types();
  j["tags"] = m.tagset.names();
  j["mode"] = to_string(m.mode);
  j["lambda"] = m.lambda;
  j["selected"] = std::vector<ClusterId>(m.selected.begin(), m.selected.end());
  j["global"] = matrix_to_json(m.global);
  nlohmann::json groups = nlohmann::json::object();
  for (const auto& [id, logits] : m.groups) groups[std::to_string(id)] = matrix_to_json(logits);
  j["groups"] = groups;
  return j;
}

inline ConfusionModel confusion_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "noisecm.confusion") throw ParseError("not a confusion model");
    if (j.at("version").get<int>() != kConfusionFormatVersion)
      throw ParseError("unsupported confusion model version");
    ConfusionModel m;
    m.tagset = TagSet(j.at("entity_types").get<std::vector<std::string>>());
    m.mode = parse_noise_mode(j.at("mode").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    for (auto id : j.at("selected").get<std::vector<ClusterId>>()) m.selected.insert(id);
    const std::size_t k = m.tagset.size();
    m.global = matrix_from_json(j.at("global"), k, k);
    for (const auto& [key, value] : j.at("groups").items())
      m.groups.emplace(static_cast<ClusterId>(std::stoull(key)), matrix_from_json(value, k, k));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("confusion model JSON: ") + e.what());
  }
}

// Text heatmap of a row-stochastic matrix: percentages plus a shade glyph
// per cell.
inline std::string render_heatmap(const Matrix& probs, const TagSet& tagset,
                                  const std::string& title) {
  static const char* kShades[] = {" ", ".", ":", "-", "=", "+", "*", "#", "%", "@"};
  const auto names = tagset.names();
  std::ostringstream out;
  out << title << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-8s", "clean\\ns");
  out << buf;
  for (const auto& n : names) {
    std::snprintf(buf, sizeof buf, " %8s", n.c_str());
    out << buf;
  }
  out << "\n";
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%-8s", names[i].c_str());
    out << buf;
    for (std::size_t j = 0; j < probs.cols(); ++j) {
      const double p = std::clamp(probs(i, j), 0.0, 1.0);
      const int shade = std::min(9, static_cast<int>(p * 10.0));
      std::snprintf(buf, sizeof buf, " %6.1f%s%s", 100.0 * p, kShades[shade], kShades[shade]);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace noisecm
