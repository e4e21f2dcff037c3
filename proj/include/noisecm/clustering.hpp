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

// Word clusterings: k-means on (PCA-reduced) embeddings and agglomerative
// Brown clustering on bigram statistics.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noisecm/corpus.hpp"
#include "noisecm/error.hpp"
#include "noisecm/linalg.hpp"
#include "noisecm/text.hpp"

namespace noisecm {

using ClusterId = std::size_t;

// Exact-match word -> cluster map with p real clusters. Unmapped words go
// to oov_id() == p.
class WordClustering {
 public:
  WordClustering() = default;
  explicit WordClustering(std::size_t num_clusters) : p_(num_clusters) {}

  void set(const std::string& word, ClusterId id) {
    if (id >= p_)
      throw ConfigError("cluster id " + std::to_string(id) + " outside [0, " +
                        std::to_string(p_) + ")");
    map_[word] = id;
  }

  ClusterId assign(const std::string& word) const {
    auto it = map_.find(word);
    return it == map_.end() ? oov_id() : it->second;
  }

  std::size_t num_clusters() const { return p_; }
  ClusterId oov_id() const { return p_; }
  std::size_t vocabulary_size() const { return map_.size(); }
  const std::unordered_map<std::string, ClusterId>& map() const { return map_; }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(p_, 0);
    for (const auto& [w, id] : map_) ++sizes[id];
    return sizes;
  }

 private:
  std::size_t p_ = 0;
  std::unordered_map<std::string, ClusterId> map_;
};

inline ClusterId assign(const WordClustering& c, const std::string& word) {
  return c.assign(word);
}

// "word<TAB>cluster_id" per line, sorted by word.
inline void write_clusters(std::ostream& out, const WordClustering& c) {
  std::map<std::string, ClusterId> sorted(c.map().begin(), c.map().end());
  for (const auto& [w, id] : sorted) out << w << '\t' << id << '\n';
}

inline void write_clusters(const std::string& path, const WordClustering& c) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_clusters(out, c);
}

// The cluster count is one past the largest id unless given explicitly.
inline WordClustering read_clusters(std::istream& in,
                                    std::optional<std::size_t> num_clusters = std::nullopt) {
  std::vector<std::pair<std::string, ClusterId>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t max_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError("expected 'word<TAB>cluster_id'", lineno);
    const std::string id_str = line.substr(tab + 1);
    ClusterId id = 0;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(id_str, &used);
      if (used != id_str.size() || v < 0) throw std::invalid_argument("id");
      id = static_cast<ClusterId>(v);
    } catch (const std::exception&) {
      throw ParseError("bad cluster id '" + id_str + "'", lineno);
    }
    max_id = std::max(max_id, id);
    rows.emplace_back(line.substr(0, tab), id);
  }
  const std::size_t p = num_clusters.value_or(rows.empty() ? 0 : max_id + 1);
  WordClustering c(p);
  for (const auto& [w, id] : rows) c.set(w, id);
  return c;
}

inline WordClustering read_clusters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_clusters(in);
}

// ---------------------------------------------------------------------------
// k-means

struct KMeansOptions {
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
};

struct KMeansState {
  Matrix centroids;                      // p x r
  std::vector<std::size_t> assignments;  // one per point
  double objective = 0.0;                // sum of squared distances
  std::vector<double> history;           // objective after every Lloyd iteration
  std::size_t iterations = 0;
};

namespace detail {

inline std::size_t count_distinct_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i).begin(), m.row(i).end());
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

inline double kmeans_objective(const Matrix& points, const Matrix& centroids,
                               const std::vector<std::size_t>& assign) {
  double obj = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    obj += squared_distance(points.row(i), centroids.row(assign[i]));
  return obj;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Empty clusters seize the point
// farthest from its centroid. Throws NumericalError if the objective ever
// increases, which would indicate a bookkeeping bug.
inline KMeansState kmeans(const Matrix& points, std::size_t p, const KMeansOptions& opt = {}) {
  const std::size_t n = points.rows(), dim = points.cols();
  if (p == 0) throw ConfigError("k-means needs at least one cluster");
  if (detail::count_distinct_rows(points) < p)
    throw ConfigError("k-means: fewer distinct points than clusters (" + std::to_string(p) + ")");

  std::mt19937_64 rng(opt.seed);
  KMeansState st;
  st.centroids = Matrix(p, dim);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t pick = first;
    if (c > 0) {
      double total = 0.0;
      for (double x : d2) total += x;
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        pick = i;
        if (target <= 0.0) break;
      }
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(), st.centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(points.row(i), st.centroids.row(c)));
  }

  st.assignments.assign(n, p);  // p = "unassigned" so the first pass always changes
  double previous = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> counts(p);
  for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points.row(i), st.centroids.row(0));
      for (std::size_t c = 1; c < p; ++c) {
        const double dd = squared_distance(points.row(i), st.centroids.row(c));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (st.assignments[i] != best) {
        st.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::fill(counts.begin(), counts.end(), 0);
    for (auto a : st.assignments) ++counts[a];
    for (std::size_t c = 0; c < p; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[st.assignments[i]] < 2) continue;
        const double dd = squared_distance(points.row(i), st.centroids.row(st.assignments[i]));
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      --counts[st.assignments[far]];
      st.assignments[far] = c;
      counts[c] = 1;
    }

    st.centroids.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = st.centroids.row(st.assignments[i]);
      for (std::size_t j = 0; j < dim; ++j) row[j] += points(i, j);
    }
    for (std::size_t c = 0; c < p; ++c)
      for (double& x : st.centroids.row(c)) x /= double(counts[c]);

    st.objective = detail::kmeans_objective(points, st.centroids, st.assignments);
    if (st.objective > previous * (1.0 + 1e-12) + 1e-12)
      throw NumericalError("k-means objective increased at iteration " + std::to_string(iter));
    previous = st.objective;
    st.history.push_back(st.objective);
    ++st.iterations;
  }
  return st;
}

inline WordClustering kmeans_cluster(const std::vector<std::string>& words, const Matrix& points,
                                     std::size_t p, const KMeansOptions& opt = {}) {
  if (words.size() != points.rows()) throw ShapeError("one point per word required");
  const KMeansState st = kmeans(points, p, opt);
  WordClustering c(p);
  for (std::size_t i = 0; i < words.size(); ++i) c.set(words[i], st.assignments[i]);
  return c;
}

// ---------------------------------------------------------------------------
// Brown clustering

// Average mutual information of a cluster-level bigram count table.
inline double average_mutual_information(const Matrix& counts) {
  const std::size_t k = counts.rows();
  std::vector<double> left(k, 0.0), right(k, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      left[a] += counts(a, b);
      right[b] += counts(a, b);
      total += counts(a, b);
    }
  if (total <= 0.0) return 0.0;
  double ami = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const double n = counts(a, b);
      if (n > 0.0) ami += n / total * std::log(n * total / (left[a] * right[b]));
    }
  return ami;
}

struct BrownOptions {
  std::size_t num_clusters = 10;
  std::size_t vocab_cap = std::numeric_limits<std::size_t>::max();
  // Active clusters kept while new words are introduced; 0 means p + 50.
  std::size_t window = 0;
};

// Agglomerative Brown clustering over an active window. Words are ranked
// by frequency (ties by byte order); the top `window` start as singletons,
// each remaining word is introduced as a new singleton followed by one
// merge, and merging continues until `num_clusters` remain. The bigram
// distribution only covers words introduced so far. Each merge takes the
// pair of active clusters with the smallest AMI loss, ties going to the
// lexicographically smallest (lower id, higher id) pair; a cluster's id is
// the rank of its most frequent word.
class BrownClusterer {
 public:
  struct Merge {
    std::size_t kept;    // cluster id that survives
    std::size_t merged;  // cluster id folded into it
    double loss;
    double ami_after;
  };

  BrownClusterer(const Corpus& corpus, const BrownOptions& opt) : p_(opt.num_clusters) {
    if (p_ == 0) throw ConfigError("Brown clustering needs at least one cluster");
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& s : corpus.sentences)
      for (const auto& t : s.tokens) ++freq[t];
    if (freq.empty()) throw ConfigError("Brown clustering needs a non-empty corpus");

    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > opt.vocab_cap) ranked.resize(opt.vocab_cap);
    if (p_ > ranked.size())
      throw ConfigError("Brown clustering: " + std::to_string(p_) +
                        " clusters requested but vocabulary has " +
                        std::to_string(ranked.size()) + " words");

    std::unordered_map<std::string, std::size_t> rank;
    for (const auto& [w, f] : ranked) {
      rank.emplace(w, vocab_.size());
      vocab_.push_back(w);
    }

    out_.resize(vocab_.size());
    in_.resize(vocab_.size());
    std::map<std::pair<std::size_t, std::size_t>, double> bigrams;
    for (const auto& s : corpus.sentences)
      for (std::size_t i = 0; i + 1 < s.tokens.size(); ++i) {
        auto a = rank.find(s.tokens[i]);
        auto b = rank.find(s.tokens[i + 1]);
        if (a != rank.end() && b != rank.end()) bigrams[{a->second, b->second}] += 1.0;
      }
    for (const auto& [key, c] : bigrams) {
      out_[key.first].emplace_back(key.second, c);
      if (key.first != key.second) in_[key.second].emplace_back(key.first, c);
    }

    window_ = opt.window ? opt.window : p_ + 50;
    if (window_ < p_) throw ConfigError("Brown window smaller than cluster count");
    word_cluster_.assign(vocab_.size(), kNone);
    const std::size_t seed = std::min(window_, vocab_.size());
    for (std::size_t r = 0; r < seed; ++r) introduce(r);
    ami_ = average_mutual_information(counts_);
  }

  bool finished() const { return next_ >= vocab_.size() && ids_.size() <= p_; }

  // The word rank the next step() introduces before merging, if any.
  std::optional<std::size_t> pending_word() const {
    if (next_ < vocab_.size()) return next_;
    return std::nullopt;
  }

  Merge step() {
    if (finished()) throw ConfigError("Brown clustering already finished");
    if (next_ < vocab_.size()) introduce(next_);

    const std::size_t k = ids_.size();
    const double total = total_;
    std::vector<double> left(k, 0.0), right(k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        left[a] += counts_(a, b);
        right[b] += counts_(a, b);
      }
    auto q = [&](double n, double l, double r) {
      return n > 0.0 ? n / total * std::log(n * total / (l * r)) : 0.0;
    };

    // TODO: cache pairwise merge losses between steps so a merge costs
    // O(window^2) instead of O(window^3).
    std::size_t best_a = 0, best_b = 1;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k && total > 0.0; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        double before = 0.0, after = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          before += q(counts_(a, c), left[a], right[c]) + q(counts_(b, c), left[b], right[c]);
          if (c != a && c != b)
            before += q(counts_(c, a), left[c], right[a]) + q(counts_(c, b), left[c], right[b]);
        }
        const double lm = left[a] + left[b], rm = right[a] + right[b];
        for (std::size_t c = 0; c < k; ++c) {
          if (c == a || c == b) continue;
          after += q(counts_(a, c) + counts_(b, c), lm, right[c]);
          after += q(counts_(c, a) + counts_(c, b), left[c], rm);
        }
        after += q(counts_(a, a) + counts_(a, b) + counts_(b, a) + counts_(b, b), lm, rm);
        const double loss = before - after;
        if (!std::isfinite(best_loss) ||
            loss < best_loss - 1e-12 * std::max(1.0, std::abs(best_loss))) {
          best_loss = loss;
          best_a = a;
          best_b = b;
        }
      }
    if (total <= 0.0) best_loss = 0.0;

    Merge m{ids_[best_a], ids_[best_b], best_loss, 0.0};
    merge_slots(best_a, best_b);
    ami_ = average_mutual_information(counts_);
    m.ami_after = ami_;
    return m;
  }

  void run() {
    while (!finished()) step();
  }

  double ami() const { return ami_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  // Member word ranks of each active cluster, in cluster-id order.
  std::vector<std::vector<std::size_t>> clusters() const { return members_; }
  const std::vector<std::size_t>& cluster_ids() const { return ids_; }

  // Word-rank bigram counts, as (left, right, count).
  std::vector<std::tuple<std::size_t, std::size_t, double>> bigrams() const {
    std::vector<std::tuple<std::size_t, std::size_t, double>> out;
    for (std::size_t a = 0; a < out_.size(); ++a)
      for (const auto& [b, c] : out_[a]) out.emplace_back(a, b, c);
    return out;
  }

  WordClustering result() const {
    if (!finished()) throw ConfigError("Brown clustering not finished");
    WordClustering c(p_);
    for (std::size_t slot = 0; slot < members_.size(); ++slot)
      for (auto r : members_[slot]) c.set(vocab_[r], slot);
    return c;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t slot_of(std::size_t word_rank) const {
    const std::size_t id = word_cluster_[word_rank];
    return static_cast<std::size_t>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
  }

  // New singleton cluster for word rank r. Its id r exceeds every active id
  // so it is appended as the last slot.
  void introduce(std::size_t r) {
    const std::size_t k = ids_.size();
    Matrix grown(k + 1, k + 1);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) grown(a, b) = counts_(a, b);
    counts_ = std::move(grown);
    ids_.push_back(r);
    members_.push_back({r});
    word_cluster_[r] = r;
    for (const auto& [y, c] : out_[r])
      if (y <= r) {
        counts_(k, slot_of(y)) += c;
        total_ += c;
      }
    for (const auto& [y, c] : in_[r])
      if (y < r) {
        counts_(slot_of(y), k) += c;
        total_ += c;
      }
    next_ = r + 1;
  }

  void merge_slots(std::size_t a, std::size_t b) {
    const std::size_t k = ids_.size();
    for (std::size_t c = 0; c < k; ++c) {
      counts_(a, c) += counts_(b, c);
      counts_(b, c) = 0.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      counts_(c, a) += counts_(c, b);
      counts_(c, b) = 0.0;
    }
    Matrix shrunk(k - 1, k - 1);
    for (std::size_t x = 0, i = 0; x < k; ++x) {
      if (x == b) continue;
      for (std::size_t y = 0, j = 0; y < k; ++y) {
        if (y == b) continue;
        shrunk(i, j++) = counts_(x, y);
      }
      ++i;
    }
    counts_ = std::move(shrunk);
    for (auto r : members_[b]) word_cluster_[r] = ids_[a];
    members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
    std::sort(members_[a].begin(), members_[a].end());
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(b));
    ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(b));
  }

  std::size_t p_;
  std::size_t window_ = 0;
  std::vector<std::string> vocab_;
  std::vector<std::vector<std::pair<std::size_t, double>>> out_, in_;
  std::vector<std::size_t> word_cluster_;  // word rank -> cluster id
  std::vector<std::size_t> ids_;           // active cluster ids, ascending
  std::vector<std::vector<std::size_t>> members_;
  Matrix counts_;
  double total_ = 0.0;
  double ami_ = 0.0;
  std::size_t next_ = 0;
};

inline WordClustering brown_cluster(const Corpus& corpus, std::size_t p,
                                    std::size_t vocab_cap = std::numeric_limits<std::size_t>::max(),
                                    std::size_t window = 0) {
  BrownClusterer b(corpus, {p, vocab_cap, window});
  b.run();
  return b.result();
}

}  // namespace noisecm
