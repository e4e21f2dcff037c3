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

#include <sstream>

#include "noisecm.hpp"
#include "oracles.hpp"

using namespace noisecm;

namespace {

std::vector<std::string> names(const std::vector<Tag>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.str());
  return out;
}

std::vector<std::string> words(const std::string& s) { return noisecm::detail::split_ws(s); }

}  // namespace

TEST(Gazetteer, MultiTokenEntry) {
  Gazetteer gaz(false);
  std::istringstream in("New York\n");
  load_gazetteer_entries(gaz, in, "LOC");
  ASSERT_EQ(gaz.size(), 1u);
  EXPECT_EQ(gaz.entries().begin()->first, words("New York"));
  EXPECT_EQ(gaz.entries().begin()->second, "LOC");
}

TEST(Gazetteer, FirstTypeWins) {
  Gazetteer gaz(false);
  std::istringstream per("Jordan\n"), loc("Jordan\n");
  load_gazetteer_entries(gaz, per, "PER");
  load_gazetteer_entries(gaz, loc, "LOC");
  EXPECT_EQ(gaz.entries().at(words("Jordan")), "PER");
  EXPECT_EQ(gaz.conflicts(), 1u);
}

TEST(Gazetteer, EmptyFileAndBlankLines) {
  Gazetteer gaz(false);
  std::istringstream empty(""), blanks("\n  \nParis\n");
  load_gazetteer_entries(gaz, empty, "LOC");
  EXPECT_EQ(gaz.size(), 0u);
  load_gazetteer_entries(gaz, blanks, "LOC");
  EXPECT_EQ(gaz.size(), 1u);
  EXPECT_EQ(gaz.skipped_lines(), 2u);
}

TEST(Gazetteer, MissingFileIsIoError) {
  EXPECT_THROW(load_gazetteer({{"/nonexistent/gaz.txt", "LOC"}}, false), IoError);
}

TEST(Gazetteer, CaseFolding) {
  Gazetteer exact(false), folded(true);
  exact.add(words("Paris"), "LOC");
  folded.add(words("Paris"), "LOC");
  EXPECT_EQ(names(annotate_tokens(words("PARIS"), exact)), (std::vector<std::string>{"O"}));
  EXPECT_EQ(names(annotate_tokens(words("PARIS"), folded)), (std::vector<std::string>{"I-LOC"}));
}

TEST(Annotate, SimpleHit) {
  Gazetteer gaz(false);
  gaz.add(words("New York"), "LOC");
  EXPECT_EQ(names(annotate_tokens(words("New York is big"), gaz)),
            (std::vector<std::string>{"I-LOC", "I-LOC", "O", "O"}));
}

TEST(Annotate, LongestMatch) {
  Gazetteer gaz(false);
  gaz.add(words("New York"), "LOC");
  gaz.add(words("New York City"), "LOC");
  gaz.add(words("York City Bank"), "ORG");
  EXPECT_EQ(names(annotate_tokens(words("New York City"), gaz)),
            (std::vector<std::string>{"I-LOC", "I-LOC", "I-LOC"}));
  // Greedy left to right: the earlier start wins over a later longer one.
  EXPECT_EQ(names(annotate_tokens(words("New York City Bank"), gaz)),
            (std::vector<std::string>{"I-LOC", "I-LOC", "I-LOC", "O"}));
}

TEST(Annotate, NoHits) {
  Gazetteer gaz(false);
  gaz.add(words("Paris"), "LOC");
  EXPECT_EQ(names(annotate_tokens(words("nothing here"), gaz)),
            (std::vector<std::string>{"O", "O"}));
}

TEST(CollectPairs, HitsAndMisses) {
  Gazetteer gaz(false);
  gaz.add(words("June"), "PER");
  const Corpus clean = oracle::corpus_from(
      {{"June", "B-PER"}, {"visited", "O"}, {"Lyon", "B-LOC"}, {"", ""}});
  const auto pairs = collect_pairs(clean, gaz);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].clean.str(), "I-PER");
  EXPECT_EQ(pairs[0].noisy.str(), "I-PER");
  EXPECT_EQ(pairs[0].word, "June");
  EXPECT_EQ(pairs[2].clean.str(), "I-LOC");
  EXPECT_EQ(pairs[2].noisy.str(), "O");
}

TEST(CollectPairs, EmptyCorpus) {
  EXPECT_TRUE(collect_pairs(Corpus{}, Gazetteer(false)).empty());
}

TEST(CollectPairs, ZipRejectsMisalignedViews) {
  const Corpus a = oracle::corpus_from({{"x", "O"}, {"", ""}});
  const Corpus b = oracle::corpus_from({{"y", "O"}, {"", ""}});
  EXPECT_THROW(zip_pairs(a, b), AlignmentError);
}

TEST(MatchPairs, UsesRepeatedSentences) {
  const Corpus clean = oracle::corpus_from({{"a", "B-PER"}, {"", ""}, {"b", "O"}, {"", ""}});
  const Corpus noisy = oracle::corpus_from({{"z", "O"}, {"", ""}, {"a", "O"}, {"", ""}});
  const auto pairs = match_pairs(clean, noisy);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].word, "a");
  EXPECT_EQ(pairs[0].noisy.str(), "O");
}

TEST(LabelingReport, FixtureHandCounts) {
  const auto f = oracle::labeling_fixture();
  const EvalReport r = labeling_report(f.gold, annotate(strip_tags(f.gold), f.gaz));
  const auto& [g, p, c] = f.counts.at("");
  EXPECT_EQ(r.overall.gold, g);
  EXPECT_EQ(r.overall.predicted, p);
  EXPECT_EQ(r.overall.correct, c);
  for (const auto& type : {"PER", "LOC", "ORG"}) {
    const auto& [tg, tp, tc] = f.counts.at(type);
    EXPECT_EQ(r.per_type.at(type).gold, tg) << type;
    EXPECT_EQ(r.per_type.at(type).predicted, tp) << type;
    EXPECT_EQ(r.per_type.at(type).correct, tc) << type;
  }
}

TEST(LabelingReport, FullGazetteerHasFullRecall) {
  const auto f = oracle::labeling_fixture();
  Gazetteer all(false);
  for (const auto& s : f.gold.sentences)
    for (const auto& span : extract_spans(*s.tags))
      all.add({s.tokens.begin() + long(span.start), s.tokens.begin() + long(span.end) + 1},
              span.type);
  const EvalReport r = labeling_report(f.gold, annotate(strip_tags(f.gold), all));
  EXPECT_DOUBLE_EQ(r.recall(), 100.0);
}

TEST(LabelingReport, EmptyGazetteer) {
  const auto f = oracle::labeling_fixture();
  const EvalReport r = labeling_report(f.gold, annotate(strip_tags(f.gold), Gazetteer(false)));
  EXPECT_EQ(r.precision(), 0.0);
  EXPECT_EQ(r.recall(), 0.0);
}
