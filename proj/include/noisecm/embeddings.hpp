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

// Pretrained word vectors (text and binary formats) and PCA.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "noisecm/error.hpp"
#include "noisecm/linalg.hpp"
#include "noisecm/text.hpp"

namespace noisecm {

enum class OovPolicy { kZero, kMean };

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  void add(const std::string& word, std::vector<double> vec) {
    if (vec.size() != dim_)
      throw ShapeError("vector for '" + word + "' has length " + std::to_string(vec.size()) +
                       ", table dimension is " + std::to_string(dim_));
    auto [it, inserted] = index_.emplace(word, words_.size());
    if (!inserted) {
      vectors_[it->second] = std::move(vec);
    } else {
      words_.push_back(word);
      vectors_.push_back(std::move(vec));
    }
    mean_.reset();
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) > 0; }
  const std::vector<std::string>& words() const { return words_; }

  // Total under the OOV policy.
  const std::vector<double>& lookup(const std::string& word, OovPolicy oov) const {
    auto it = index_.find(word);
    if (it != index_.end()) return vectors_[it->second];
    return oov == OovPolicy::kZero ? zero() : mean();
  }

  const std::vector<double>& mean() const {
    if (!mean_) {
      std::vector<double> m(dim_, 0.0);
      for (const auto& v : vectors_)
        for (std::size_t i = 0; i < dim_; ++i) m[i] += v[i];
      if (!vectors_.empty())
        for (double& x : m) x /= double(vectors_.size());
      mean_ = std::move(m);
    }
    return *mean_;
  }

 private:
  const std::vector<double>& zero() const {
    if (zero_.size() != dim_) zero_.assign(dim_, 0.0);
    return zero_;
  }

  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  mutable std::optional<std::vector<double>> mean_;
  mutable std::vector<double> zero_;
};

// Text format: header "count dim", then "word v1 ... vd" per line.
inline EmbeddingTable load_vectors(std::istream& in,
                                   const std::unordered_set<std::string>* vocab_filter = nullptr) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty vector file", 1);
  ++lineno;
  std::istringstream header(line);
  long long count = -1, dim = -1;
  if (!(header >> count >> dim) || count < 0 || dim <= 0)
    throw ParseError("expected header 'count dim'", lineno);

  EmbeddingTable table(static_cast<std::size_t>(dim));
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != static_cast<std::size_t>(dim) + 1)
      throw ParseError("expected " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size() - 1),
                       lineno);
    if (vocab_filter && !vocab_filter->count(fields[0])) continue;
    std::vector<double> vec(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < vec.size(); ++i) {
      try {
        std::size_t used = 0;
        vec[i] = std::stod(fields[i + 1], &used);
        if (used != fields[i + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("bad number '" + fields[i + 1] + "'", lineno);
      }
    }
    table.add(fields[0], std::move(vec));
  }
  return table;
}

inline EmbeddingTable load_vectors(const std::string& path,
                                   const std::unordered_set<std::string>* vocab_filter = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return load_vectors(in, vocab_filter);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_vectors(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  out.precision(17);
  for (const auto& w : table.words()) {
    out << w;
    for (double x : table.lookup(w, OovPolicy::kZero)) out << ' ' << x;
    out << '\n';
  }
}

inline void write_vectors(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_vectors(out, table);
}

// Binary cache: magic "NCMV", version byte, u64 dim, u64 count, then per
// word a u64 length, the bytes, and dim little-endian doubles.
inline constexpr std::uint8_t kVectorCacheVersion = 1;

inline void write_vector_cache(std::ostream& out, const EmbeddingTable& table) {
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  out.write("NCMV", 4);
  out.put(static_cast<char>(kVectorCacheVersion));
  put_u64(table.dim());
  put_u64(table.size());
  for (const auto& w : table.words()) {
    put_u64(w.size());
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
    const auto& v = table.lookup(w, OovPolicy::kZero);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
}

inline EmbeddingTable read_vector_cache(std::istream& in) {
  auto get_u64 = [&] {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 8)) throw ParseError("truncated vector cache");
    return v;
  };
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "NCMV", 4) != 0)
    throw ParseError("not a vector cache");
  const int version = in.get();
  if (version != kVectorCacheVersion)
    throw ParseError("unsupported vector cache version " + std::to_string(version));
  const auto dim = get_u64();
  const auto count = get_u64();
  EmbeddingTable table(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string w(get_u64(), '\0');
    std::vector<double> v(dim);
    if (!in.read(w.data(), static_cast<std::streamsize>(w.size())) ||
        !in.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(dim * sizeof(double))))
      throw ParseError("truncated vector cache");
    table.add(w, std::move(v));
  }
  return table;
}

struct PcaTransform {
  std::vector<double> mean;         // length d
  Matrix components;                // r x d, orthonormal rows
  std::vector<double> explained;    // length r, non-increasing

  std::size_t input_dim() const { return mean.size(); }
  std::size_t output_dim() const { return components.rows(); }
};

struct PcaOptions {
  std::size_t max_iter = 1000;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
};

// Top-r principal axes of the sample covariance, found by power iteration
// with deflation. Each iterate is re-orthogonalized against the axes found
// so far.
inline PcaTransform fit_pca(const Matrix& points, std::size_t r, const PcaOptions& opt = {}) {
  const std::size_t n = points.rows(), d = points.cols();
  if (n < 2) throw ConfigError("PCA needs at least two points");
  if (r == 0 || r > std::min(n, d))
    throw ConfigError("PCA dimension " + std::to_string(r) + " outside [1, min(n, d)]");

  PcaTransform t;
  t.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) t.mean[j] += points(i, j);
  for (double& m : t.mean) m /= double(n);

  Matrix cov(d, d);
  std::vector<double> c(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) c[j] = points(i, j) - t.mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov(a, b) += c[a] * c[b];
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= double(n - 1);
      cov(b, a) = cov(a, b);
    }

  const Matrix original = cov;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> found;

  auto orthonormalize = [&](std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : found) {
        const double p = dot(u, v);
        for (std::size_t j = 0; j < d; ++j) v[j] -= p * u[j];
      }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-300) return false;
    for (double& x : v) x /= norm;
    return true;
  };

  for (std::size_t k = 0; k < r; ++k) {
    std::vector<double> v(d);
    do {
      for (double& x : v) x = gauss(rng);
    } while (!orthonormalize(v));

    for (std::size_t it = 0; it < opt.max_iter; ++it) {
      std::vector<double> next = multiply(cov, v);
      if (!orthonormalize(next)) break;  // remaining variance is zero
      double diff = 0.0;
      const double sign = dot(next, v) < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::abs(next[j] - sign * v[j]));
      v = std::move(next);
      if (diff < opt.tolerance) break;
    }

    // Deterministic sign: largest-magnitude coordinate positive.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0)
      for (double& x : v) x = -x;

    const double lambda = dot(v, multiply(original, v));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov(a, b) -= lambda * v[a] * v[b];
    found.push_back(v);
    t.explained.push_back(lambda);
  }

  // Power iteration can return near-equal eigenvalues out of order.
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.explained[a] > t.explained[b];
  });
  t.components = Matrix(r, d);
  std::vector<double> sorted(r);
  for (std::size_t i = 0; i < r; ++i) {
    sorted[i] = t.explained[order[i]];
    for (std::size_t j = 0; j < d; ++j) t.components(i, j) = found[order[i]][j];
  }
  t.explained = std::move(sorted);
  return t;
}

inline std::vector<double> project(const PcaTransform& t, std::span<const double> v) {
  if (v.size() != t.input_dim())
    throw ShapeError("projection input has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(t.input_dim()));
  std::vector<double> centered(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) centered[j] = v[j] - t.mean[j];
  return multiply(t.components, centered);
}

inline std::vector<double> reconstruct(const PcaTransform& t, std::span<const double> y) {
  if (y.size() != t.output_dim()) throw ShapeError("reconstruction input length mismatch");
  std::vector<double> out = t.mean;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += y[i] * t.components(i, j);
  return out;
}

// Fixed Gaussian vectors for a vocabulary, drawn in sorted word order so
// the table depends only on the word set and the seed.
inline EmbeddingTable random_embeddings(std::vector<std::string> words, std::size_t dim,
                                        std::uint64_t seed) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  EmbeddingTable table(dim);
  for (const auto& w : words) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    table.add(w, std::move(v));
  }
  return table;
}

}  // namespace noisecm
