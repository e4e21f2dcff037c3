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

#include "noisecm.hpp"
#include "oracles.hpp"

using namespace noisecm;

namespace {

std::vector<Tag> iob(const std::vector<std::string>& names) {
  std::vector<Tag> out;
  for (const auto& n : names) out.push_back(parse_tag(n, default_entity_types(), TagScheme::kIOB2));
  return out;
}

}  // namespace

TEST(Spans, BeginInside) {
  EXPECT_EQ(extract_spans(iob({"B-PER", "I-PER", "O"})),
            (std::vector<EntitySpan>{{0, 0, 1, "PER"}}));
}

TEST(Spans, InsideAfterOutsideRepair) {
  EXPECT_EQ(extract_spans(iob({"O", "I-LOC"})), (std::vector<EntitySpan>{{0, 1, 1, "LOC"}}));
  EXPECT_TRUE(extract_spans(iob({"O", "I-LOC"}), 0, true).empty());
}

TEST(Spans, AdjacentBegins) {
  EXPECT_EQ(extract_spans(iob({"B-PER", "B-PER"})),
            (std::vector<EntitySpan>{{0, 0, 0, "PER"}, {0, 1, 1, "PER"}}));
}

TEST(Spans, TypeChangeStartsNewSpan) {
  EXPECT_EQ(extract_spans(iob({"I-PER", "I-LOC"})),
            (std::vector<EntitySpan>{{0, 0, 0, "PER"}, {0, 1, 1, "LOC"}}));
}

TEST(Score, IdenticalPredictions) {
  const auto f = oracle::eval_fixture();
  const auto r = score(f.gold, f.gold);
  EXPECT_EQ(format_percent(r.precision()), "100.0");
  EXPECT_EQ(format_percent(r.recall()), "100.0");
  EXPECT_EQ(format_percent(r.f1()), "100.0");
}

TEST(Score, OneMatchOneSpurious) {
  const Corpus gold = oracle::corpus_from(
      {{"a", "B-PER"}, {"b", "O"}, {"c", "B-LOC"}, {"", ""}});
  const Corpus pred = oracle::corpus_from(
      {{"a", "B-PER"}, {"b", "B-ORG"}, {"c", "O"}, {"", ""}});
  const auto r = score(gold, pred);
  EXPECT_EQ(format_percent(r.precision()), "50.0");
  EXPECT_EQ(format_percent(r.recall()), "50.0");
  EXPECT_EQ(format_percent(r.f1()), "50.0");
}

TEST(Score, EmptyPredictions) {
  const auto f = oracle::eval_fixture();
  Corpus all_outside = f.gold;
  for (auto& sent : all_outside.sentences) sent.tags = std::vector<Tag>(sent.size());
  const auto r = score(f.gold, all_outside);
  EXPECT_EQ(r.precision(), 0.0);
  EXPECT_EQ(r.recall(), 0.0);
  EXPECT_EQ(r.f1(), 0.0);
}

TEST(Score, HandCountedFixture) {
  const auto f = oracle::eval_fixture();
  const auto r = score(f.gold, f.pred);
  for (const auto& [type, c] : f.counts) {
    const SpanCounts& got = type.empty() ? r.overall : r.per_type.at(type);
    EXPECT_EQ(got.gold, std::get<0>(c)) << type;
    EXPECT_EQ(got.predicted, std::get<1>(c)) << type;
    EXPECT_EQ(got.correct, std::get<2>(c)) << type;
  }
  EXPECT_EQ(format_percent(r.precision()), f.p);
  EXPECT_EQ(format_percent(r.recall()), f.r);
  EXPECT_EQ(format_percent(r.f1()), f.f);
  EXPECT_EQ(r.tokens, f.tokens);
  EXPECT_EQ(r.tokens_correct, f.tokens_correct);
}

TEST(Score, MisalignedCorpora) {
  const auto f = oracle::eval_fixture();
  Corpus shorter = f.pred;
  shorter.sentences.pop_back();
  EXPECT_THROW(score(f.gold, shorter), AlignmentError);
  Corpus untagged = strip_tags(f.pred);
  EXPECT_THROW(score(f.gold, untagged), AlignmentError);
}

TEST(Render, ConllevalLayout) {
  const auto f = oracle::eval_fixture();
  const std::string text = render_text(score(f.gold, f.pred));
  EXPECT_NE(text.find("processed " + std::to_string(f.tokens) + " tokens with 12 phrases; found: 11 phrases; correct: 7."),
            std::string::npos)
      << text;
  EXPECT_NE(text.find("precision:   63.6%; recall:   58.3%; FB1:   60.9"), std::string::npos)
      << text;
  const auto j = to_json(score(f.gold, f.pred));
  EXPECT_EQ(j.at("per_type").at("LOC").at("correct"), 1);
}
