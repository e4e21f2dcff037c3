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

// Gazetteer-based distant supervision: greedy longest-match labeling of
// untagged text, and the clean/noisy label pairs used to initialize the
// confusion matrices.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "noisecm/corpus.hpp"
#include "noisecm/error.hpp"

namespace noisecm {

class Gazetteer {
 public:
  explicit Gazetteer(bool case_fold = false) : case_fold_(case_fold) {}

  // Adds an entry; returns false (and counts a conflict) when the surface
  // form is already present. The first type seen for a form wins.
  bool add(std::vector<std::string> tokens, const std::string& type) {
    if (tokens.empty()) return false;
    if (case_fold_)
      for (auto& t : tokens) t = fold(t);
    auto [it, inserted] = entries_.emplace(std::move(tokens), type);
    if (!inserted) {
      ++conflicts_;
      return false;
    }
    max_len_ = std::max(max_len_, it->first.size());
    ++type_counts_[type];
    return true;
  }

  // Type of the longest entry starting at `pos`, with its length in tokens.
  // Length 0 means no entry matches.
  std::pair<std::size_t, const std::string*> longest_match(
      const std::vector<std::string>& tokens, std::size_t pos) const {
    std::vector<std::string> key;
    std::pair<std::size_t, const std::string*> best{0, nullptr};
    for (std::size_t len = 1; len <= max_len_ && pos + len <= tokens.size(); ++len) {
      key.push_back(case_fold_ ? fold(tokens[pos + len - 1]) : tokens[pos + len - 1]);
      auto it = entries_.find(key);
      if (it != entries_.end()) best = {len, &it->second};
    }
    return best;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool case_fold() const { return case_fold_; }
  std::size_t conflicts() const { return conflicts_; }
  std::size_t skipped_lines() const { return skipped_; }
  const std::map<std::string, std::size_t>& type_counts() const { return type_counts_; }
  const std::map<std::vector<std::string>, std::string>& entries() const { return entries_; }

  void note_skipped_line() { ++skipped_; }

 private:
  static std::string fold(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  bool case_fold_;
  std::map<std::vector<std::string>, std::string> entries_;
  std::map<std::string, std::size_t> type_counts_;
  std::size_t max_len_ = 0;
  std::size_t conflicts_ = 0;
  std::size_t skipped_ = 0;
};

// One entry per line, tokens separated by whitespace. Empty lines are
// skipped and counted.
inline void load_gazetteer_entries(Gazetteer& gaz, std::istream& in, const std::string& type) {
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) {
      gaz.note_skipped_line();
      continue;
    }
    gaz.add(std::move(tokens), type);
  }
}

struct GazetteerSource {
  std::string path;
  std::string type;
};

inline Gazetteer load_gazetteer(const std::vector<GazetteerSource>& sources,
                                bool case_fold = false) {
  Gazetteer gaz(case_fold);
  for (const auto& src : sources) {
    std::ifstream in(src.path);
    if (!in) throw IoError("cannot open gazetteer " + src.path);
    load_gazetteer_entries(gaz, in, src.type);
  }
  return gaz;
}

inline std::vector<Tag> annotate_tokens(const std::vector<std::string>& tokens,
                                        const Gazetteer& gaz) {
  std::vector<Tag> tags(tokens.size(), Tag::outside());
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    auto [len, type] = gaz.longest_match(tokens, pos);
    if (len == 0) {
      ++pos;
      continue;
    }
    for (std::size_t i = 0; i < len; ++i) tags[pos + i] = Tag::inside(*type);
    pos += len;
  }
  return tags;
}

// Labels every sentence in IO scheme. Existing tags are replaced.
inline Corpus annotate(const Corpus& corpus, const Gazetteer& gaz) {
  Corpus out{{}, CorpusRole::kNoisy};
  out.sentences.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences)
    out.sentences.push_back({s.tokens, annotate_tokens(s.tokens, gaz)});
  return out;
}

struct LabeledPair {
  Tag clean;
  Tag noisy;
  std::string word;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

// Token-wise zip of a clean corpus with a noisily labeled view of the same
// sentences.
inline std::vector<LabeledPair> zip_pairs(const Corpus& clean, const Corpus& noisy_view) {
  if (clean.sentences.size() != noisy_view.sentences.size())
    throw AlignmentError("clean and noisy views differ in sentence count");
  std::vector<LabeledPair> pairs;
  for (std::size_t s = 0; s < clean.sentences.size(); ++s) {
    const auto& c = clean.sentences[s];
    const auto& n = noisy_view.sentences[s];
    if (!c.tags || !n.tags) throw ConfigError("label pairs need tagged sentences");
    if (c.tokens != n.tokens)
      throw AlignmentError("sentence " + std::to_string(s) + " differs between views");
    for (std::size_t i = 0; i < c.size(); ++i)
      pairs.push_back({iob2_to_io({(*c.tags)[i]})[0], (*n.tags)[i], c.tokens[i]});
  }
  return pairs;
}

// Runs the gazetteer over a tag-stripped copy of the clean corpus.
inline std::vector<LabeledPair> collect_pairs(const Corpus& clean, const Gazetteer& gaz) {
  if (!clean.fully_tagged()) throw ConfigError("collect_pairs needs a fully tagged corpus");
  return zip_pairs(clean, annotate(strip_tags(clean), gaz));
}

// Pairs from clean sentences that reappear verbatim in a noisy corpus
// (the usual case when the noisy set is the distantly labeled full
// training text). The first noisy occurrence of a token sequence is used.
inline std::vector<LabeledPair> match_pairs(const Corpus& clean, const Corpus& noisy) {
  std::map<std::vector<std::string>, const Sentence*> by_tokens;
  for (const auto& s : noisy.sentences)
    if (s.tags) by_tokens.emplace(s.tokens, &s);
  Corpus c{{}, CorpusRole::kClean};
  Corpus n{{}, CorpusRole::kNoisy};
  for (const auto& s : clean.sentences) {
    auto it = by_tokens.find(s.tokens);
    if (it == by_tokens.end() || !s.tags) continue;
    c.sentences.push_back(s);
    n.sentences.push_back(*it->second);
  }
  if (c.sentences.empty())
    throw ConfigError("no clean sentence occurs in the noisy corpus; label pairs unavailable");
  return zip_pairs(c, n);
}

}  // namespace noisecm
