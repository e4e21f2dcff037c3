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

// Entity-level precision / recall / F1 with conlleval semantics.

#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "noisecm/corpus.hpp"
#include "noisecm/error.hpp"

namespace noisecm {

struct EntitySpan {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::string type;

  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

// Maximal spans of an IOB2 (or IO) sequence. In lenient mode an I- tag
// that does not continue a span of its own type opens a new one, as the
// CoNLL script does; in strict mode such a tag is ignored.
inline std::vector<EntitySpan> extract_spans(const std::vector<Tag>& tags,
                                             std::size_t sentence = 0, bool strict = false) {
  std::vector<EntitySpan> spans;
  bool open = false;
  EntitySpan cur;
  auto close = [&] {
    if (open) spans.push_back(cur);
    open = false;
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (t.is_outside()) {
      close();
    } else if (t.prefix == Tag::Prefix::kBegin) {
      close();
      cur = {sentence, i, i, t.type};
      open = true;
    } else if (open && cur.type == t.type) {
      cur.end = i;
    } else {
      close();
      if (!strict) {
        cur = {sentence, i, i, t.type};
        open = true;
      }
    }
  }
  close();
  return spans;
}

struct SpanCounts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  double precision() const { return predicted ? 100.0 * double(correct) / double(predicted) : 0.0; }
  double recall() const { return gold ? 100.0 * double(correct) / double(gold) : 0.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

struct EvalReport {
  SpanCounts overall;
  std::map<std::string, SpanCounts> per_type;
  std::size_t tokens = 0;
  std::size_t tokens_correct = 0;

  double precision() const { return overall.precision(); }
  double recall() const { return overall.recall(); }
  double f1() const { return overall.f1(); }
};

inline EvalReport score(const Corpus& gold, const Corpus& predicted, bool strict = false) {
  if (gold.sentences.size() != predicted.sentences.size())
    throw AlignmentError("gold has " + std::to_string(gold.sentences.size()) +
                         " sentences, prediction has " +
                         std::to_string(predicted.sentences.size()));
  EvalReport r;
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto& g = gold.sentences[s];
    const auto& p = predicted.sentences[s];
    if (!g.tags || !p.tags) throw AlignmentError("sentence " + std::to_string(s) + " is untagged");
    if (g.tokens.size() != p.tokens.size())
      throw AlignmentError("sentence " + std::to_string(s) + " differs in length");
    r.tokens += g.size();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (iob2_to_io({(*g.tags)[i]}) == iob2_to_io({(*p.tags)[i]})) ++r.tokens_correct;

    const auto gs = extract_spans(*g.tags, s, strict);
    const auto ps = extract_spans(*p.tags, s, strict);
    const std::set<EntitySpan> gold_set(gs.begin(), gs.end());
    for (const auto& sp : gs) {
      ++r.overall.gold;
      ++r.per_type[sp.type].gold;
    }
    for (const auto& sp : ps) {
      ++r.overall.predicted;
      ++r.per_type[sp.type].predicted;
      if (gold_set.count(sp)) {
        ++r.overall.correct;
        ++r.per_type[sp.type].correct;
      }
    }
  }
  return r;
}

// Quality of an automatic (distantly supervised) labeling against gold.
inline EvalReport labeling_report(const Corpus& gold, const Corpus& automatic) {
  return score(gold, automatic);
}

inline std::string format_percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline std::string render_text(const EvalReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "processed %zu tokens with %zu phrases; found: %zu phrases; correct: %zu.\n",
                r.tokens, r.overall.gold, r.overall.predicted, r.overall.correct);
  out += buf;
  const double acc = r.tokens ? 100.0 * double(r.tokens_correct) / double(r.tokens) : 0.0;
  std::snprintf(buf, sizeof buf,
                "accuracy: %6.1f%%; precision: %6.1f%%; recall: %6.1f%%; FB1: %6.1f\n", acc,
                r.precision(), r.recall(), r.f1());
  out += buf;
  for (const auto& [type, c] : r.per_type) {
    std::snprintf(buf, sizeof buf,
                  "%17s: precision: %6.1f%%; recall: %6.1f%%; FB1: %6.1f  %zu\n", type.c_str(),
                  c.precision(), c.recall(), c.f1(), c.predicted);
    out += buf;
  }
  return out;
}

inline nlohmann::json to_json(const SpanCounts& c) {
  return {{"gold", c.gold},
          {"predicted", c.predicted},
          {"correct", c.correct},
          {"precision", c.precision()},
          {"recall", c.recall()},
          {"f1", c.f1()}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = to_json(r.overall);
  j["tokens"] = r.tokens;
  j["tokens_correct"] = r.tokens_correct;
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [t, c] : r.per_type) types[t] = to_json(c);
  j["per_type"] = types;
  return j;
}

}  // namespace noisecm
