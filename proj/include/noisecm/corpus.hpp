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

// CoNLL column corpora, the IO / IOB2 tag schemes and the clean/noisy split.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noisecm/error.hpp"
#include "noisecm/text.hpp"

namespace noisecm {

enum class TagScheme { kIO, kIOB2 };

inline const std::vector<std::string>& default_entity_types() {
  static const std::vector<std::string> types = {"PER", "LOC", "ORG", "MISC"};
  return types;
}

struct Tag {
  enum class Prefix : std::uint8_t { kOutside, kBegin, kInside };

  Prefix prefix = Prefix::kOutside;
  std::string type;  // empty iff Outside

  static Tag outside() { return {}; }
  static Tag inside(std::string t) { return {Prefix::kInside, std::move(t)}; }
  static Tag begin(std::string t) { return {Prefix::kBegin, std::move(t)}; }

  bool is_outside() const { return prefix == Prefix::kOutside; }

  std::string str() const {
    switch (prefix) {
      case Prefix::kOutside: return "O";
      case Prefix::kBegin: return "B-" + type;
      case Prefix::kInside: return "I-" + type;
    }
    return "O";
  }

  friend bool operator==(const Tag&, const Tag&) = default;
};

// Parses "O", "I-<TYPE>" and, under IOB2, "B-<TYPE>". The type must come
// from `inventory`. Throws ParseError (without line number; callers add it).
inline Tag parse_tag(std::string_view s, const std::vector<std::string>& inventory,
                     TagScheme scheme) {
  if (s == "O") return Tag::outside();
  if (s.size() > 2 && s[1] == '-' && (s[0] == 'I' || s[0] == 'B')) {
    if (s[0] == 'B' && scheme == TagScheme::kIO)
      throw ParseError("tag '" + std::string(s) + "' is not valid in the IO scheme");
    std::string type(s.substr(2));
    if (std::find(inventory.begin(), inventory.end(), type) == inventory.end())
      throw ParseError("entity type '" + type + "' not in the configured inventory");
    return s[0] == 'B' ? Tag::begin(std::move(type)) : Tag::inside(std::move(type));
  }
  throw ParseError("malformed tag '" + std::string(s) + "'");
}

// The IO label inventory: index 0 is O, then I-<TYPE> in inventory order.
class TagSet {
 public:
  TagSet() : TagSet(default_entity_types()) {}
  explicit TagSet(std::vector<std::string> entity_types)
      : types_(std::move(entity_types)) {
    for (std::size_t i = 0; i < types_.size(); ++i) {
      if (types_[i].empty()) throw ConfigError("empty entity type");
      for (std::size_t j = 0; j < i; ++j)
        if (types_[j] == types_[i]) throw ConfigError("duplicate entity type " + types_[i]);
    }
  }

  std::size_t size() const { return types_.size() + 1; }
  const std::vector<std::string>& entity_types() const { return types_; }

  Tag tag(std::size_t index) const {
    if (index == 0) return Tag::outside();
    return Tag::inside(types_.at(index - 1));
  }

  // Index of an IO tag. B-<TYPE> is accepted and treated as I-<TYPE>.
  std::size_t index(const Tag& t) const {
    if (t.is_outside()) return 0;
    for (std::size_t i = 0; i < types_.size(); ++i)
      if (types_[i] == t.type) return i + 1;
    throw ConfigError("tag " + t.str() + " not in tag set");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(tag(i).str());
    return out;
  }

  friend bool operator==(const TagSet&, const TagSet&) = default;

 private:
  std::vector<std::string> types_;
};

struct Sentence {
  std::vector<std::string> tokens;
  std::optional<std::vector<Tag>> tags;

  std::size_t size() const { return tokens.size(); }
  bool tagged() const { return tags.has_value(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class CorpusRole { kClean, kNoisy, kUnlabeled, kTest };

struct Corpus {
  std::vector<Sentence> sentences;
  CorpusRole role = CorpusRole::kClean;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
  bool fully_tagged() const {
    return std::all_of(sentences.begin(), sentences.end(),
                       [](const Sentence& s) { return s.tagged(); });
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct ConllOptions {
  std::size_t token_column = 0;
  // nullopt reads an untagged (unlabeled) corpus.
  std::optional<std::size_t> tag_column = 1;
  TagScheme scheme = TagScheme::kIO;
  std::vector<std::string> inventory = default_entity_types();
  CorpusRole role = CorpusRole::kClean;
};

inline Corpus read_conll(std::istream& in, const ConllOptions& opt = {}) {
  Corpus corpus;
  corpus.role = opt.role;
  const bool want_tags = opt.tag_column.has_value();
  const std::size_t needed =
      std::max(opt.token_column, want_tags ? *opt.tag_column : 0) + 1;

  Sentence current;
  if (want_tags) current.tags.emplace();
  std::size_t columns = 0;

  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = Sentence{};
    if (want_tags) current.tags.emplace();
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = detail::split_ws(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields[0] == "-DOCSTART-") continue;
    if (columns == 0) {
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw ParseError("ragged columns: expected " + std::to_string(columns) + ", got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    if (fields.size() < needed)
      throw ParseError("expected at least " + std::to_string(needed) + " columns", lineno);
    current.tokens.push_back(fields[opt.token_column]);
    if (want_tags) {
      try {
        current.tags->push_back(parse_tag(fields[*opt.tag_column], opt.inventory, opt.scheme));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), lineno);
      }
    }
  }
  flush();
  return corpus;
}

inline Corpus read_conll(const std::string& path, const ConllOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_conll(in, opt);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Writes "token<SP>tag" lines (token only for untagged sentences) with a
// blank line after each sentence.
inline void write_conll(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.tokens[i];
      if (s.tags) out << ' ' << (*s.tags)[i].str();
      out << '\n';
    }
    out << '\n';
  }
}

inline void write_conll(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_conll(out, corpus);
}

inline Corpus strip_tags(Corpus corpus, CorpusRole role = CorpusRole::kUnlabeled) {
  for (auto& s : corpus.sentences) s.tags.reset();
  corpus.role = role;
  return corpus;
}

// Sentence-level split. The clean part keeps its tags; the rest is returned
// untagged, ready for distant supervision. Both parts keep input order.
inline std::pair<Corpus, Corpus> split_clean_noisy(const Corpus& corpus,
                                                   double clean_fraction,
                                                   std::uint64_t seed) {
  if (!(clean_fraction > 0.0 && clean_fraction < 1.0))
    throw ConfigError("clean fraction must lie in (0, 1)");
  if (!corpus.fully_tagged()) throw ConfigError("split requires a fully tagged corpus");

  const std::size_t n = corpus.sentences.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_clean = static_cast<std::size_t>(std::llround(clean_fraction * double(n)));

  std::vector<bool> is_clean(n, false);
  for (std::size_t i = 0; i < n_clean; ++i) is_clean[order[i]] = true;

  Corpus clean{{}, CorpusRole::kClean};
  Corpus rest{{}, CorpusRole::kUnlabeled};
  for (std::size_t i = 0; i < n; ++i) {
    if (is_clean[i]) {
      clean.sentences.push_back(corpus.sentences[i]);
    } else {
      Sentence s = corpus.sentences[i];
      s.tags.reset();
      rest.sentences.push_back(std::move(s));
    }
  }
  return {std::move(clean), std::move(rest)};
}

// IO -> IOB2: the first token of each maximal same-type run becomes B-.
inline std::vector<Tag> io_to_iob2(const std::vector<Tag>& tags) {
  std::vector<Tag> out;
  out.reserve(tags.size());
  const Tag* prev = nullptr;
  for (const auto& t : tags) {
    if (t.is_outside()) {
      out.push_back(Tag::outside());
    } else if (prev && !prev->is_outside() && prev->type == t.type) {
      out.push_back(Tag::inside(t.type));
    } else {
      out.push_back(Tag::begin(t.type));
    }
    prev = &t;
  }
  return out;
}

// IOB2 -> IO. Lossy for adjacent entities of the same type.
inline std::vector<Tag> iob2_to_io(const std::vector<Tag>& tags) {
  std::vector<Tag> out;
  out.reserve(tags.size());
  for (const auto& t : tags)
    out.push_back(t.is_outside() ? Tag::outside() : Tag::inside(t.type));
  return out;
}

}  // namespace noisecm
