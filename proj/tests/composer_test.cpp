// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "stfact/composer.hpp"
#include "stfact/error.hpp"

namespace stfact {
namespace {

StatementTriplet tri(std::string s, Sentiment p) { return {std::move(s), "other", p, std::nullopt, {}}; }

const std::vector<StatementTriplet> kSweater{tri("The material feels cheap", Sentiment::kNegative),
                                             tri("It runs true to size", Sentiment::kNeutral),
                                             tri("The design is really cute", Sentiment::kPositive)};

constexpr const char* kSweaterParagraph =
    "The user would appreciate this product because the design is really cute. However, they may dislike "
    "that the material feels cheap. They seem indifferent to it runs true to size.";

TEST(Compose, SweaterParagraph) { EXPECT_EQ(compose_explanation(kSweater), kSweaterParagraph); }

TEST(Compose, SingleGroups) {
  const std::vector<StatementTriplet> neutral{tri("it runs true to size", Sentiment::kNeutral)};
  EXPECT_EQ(compose_explanation(neutral), "They seem indifferent to it runs true to size.");
  const std::vector<StatementTriplet> two{tri("a", Sentiment::kPositive), tri("b", Sentiment::kPositive)};
  EXPECT_EQ(compose_explanation(two), "The user would appreciate this product because a and b.");
  const std::vector<StatementTriplet> three{tri("a", Sentiment::kPositive), tri("b", Sentiment::kPositive),
                                            tri("c", Sentiment::kPositive)};
  EXPECT_EQ(compose_explanation(three), "The user would appreciate this product because a, b and c.");
}

TEST(Compose, NegativeWithoutPositiveDropsHowever) {
  const std::vector<StatementTriplet> x{tri("Zips stick", Sentiment::kNegative),
                                        tri("it is blue", Sentiment::kNeutral)};
  EXPECT_EQ(compose_explanation(x), "They may dislike that zips stick. They seem indifferent to it is blue.");
  const auto g = parse_composed(compose_explanation(x));
  ASSERT_TRUE(g);
  EXPECT_EQ((*g)[Sentiment::kNegative], std::vector<std::string>{"zips stick"});
}

TEST(Compose, EmptyInput) {
  try {
    compose_explanation({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyInput);
  }
}

TEST(Compose, LowercaseFirstTouchesOnlyAsciiCapital) {
  EXPECT_EQ(lowercase_first("The"), "the");
  EXPECT_EQ(lowercase_first("iPhone"), "iPhone");
  EXPECT_EQ(lowercase_first(""), "");
  EXPECT_EQ(lowercase_first("\xc3\x89t\xc3\xa9"), "\xc3\x89t\xc3\xa9");
}

TEST(ParseComposed, SweaterParagraph) {
  const auto g = parse_composed(kSweaterParagraph);
  ASSERT_TRUE(g);
  EXPECT_EQ((*g)[Sentiment::kPositive], std::vector<std::string>{"the design is really cute"});
  EXPECT_EQ((*g)[Sentiment::kNegative], std::vector<std::string>{"the material feels cheap"});
  EXPECT_EQ((*g)[Sentiment::kNeutral], std::vector<std::string>{"it runs true to size"});
  EXPECT_EQ(g->statements(), (std::vector<std::string>{"the design is really cute", "the material feels cheap",
                                                        "it runs true to size"}));
}

TEST(ParseComposed, FreeFormIsRejected) {
  EXPECT_FALSE(parse_composed("Great toy, my kid loves it"));
  EXPECT_FALSE(parse_composed(""));
  EXPECT_FALSE(parse_composed("The user would appreciate this product because a"));
  EXPECT_FALSE(parse_composed("They seem indifferent to ."));
}

TEST(Template, Validation) {
  ComposerTemplate t;
  EXPECT_NO_THROW(validate(t));
  t.neutral_prefix = "";
  EXPECT_THROW(validate(t), Error);
  t = {};
  t.negative_prefix = "The user would";
  EXPECT_THROW(validate(t), Error);
}

TEST(Template, CustomTemplateRoundTrips) {
  ComposerTemplate t;
  t.positive_prefix = "Liked: ";
  t.negative_prefix = "But disliked: ";
  t.standalone_negative_prefix = "Disliked: ";
  t.neutral_prefix = "Neutral on: ";
  t.list_joiner = "; ";
  t.final_joiner = " plus ";
  t.sentence_terminator = "!";
  const std::string s = compose_explanation(kSweater, t);
  EXPECT_EQ(s, "Liked: the design is really cute! But disliked: the material feels cheap! Neutral on: it runs "
               "true to size!");
  const auto g = parse_composed(s, t);
  ASSERT_TRUE(g);
  EXPECT_EQ((*g)[Sentiment::kNeutral], std::vector<std::string>{"it runs true to size"});
}

std::string random_statement(std::mt19937& rng) {
  static const std::vector<std::string> words{"soft", "The", "zipper", "is", "fit", "Runs", "small",
                                              "color", "a", "bit", "loud", "it's", "great", "x-ray", "cheap"};
  std::string s;
  const int n = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[rng() % words.size()];
  }
  return s;
}

TEST(ComposerProperty, PreservationRoundTripAndGroupOrder) {
  std::mt19937 rng(2026);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<StatementTriplet> x;
    const int n = 1 + static_cast<int>(rng() % 7);
    for (int i = 0; i < n; ++i) x.push_back(tri(random_statement(rng), kSentiments[rng() % 3]));
    const std::string s = compose_explanation(x);
    EXPECT_EQ(s, compose_explanation(x));

    ComposedGroups expected;
    for (const auto& t : x) {
      const std::string lowered = lowercase_first(t.statement);
      EXPECT_NE(s.find(lowered), std::string::npos);
      expected[t.sentiment].push_back(lowered);
    }
    const auto g = parse_composed(s);
    ASSERT_TRUE(g) << s;
    EXPECT_EQ(*g, expected) << s;

    const ComposerTemplate tpl;
    std::vector<std::size_t> starts;
    if (!expected[Sentiment::kPositive].empty()) starts.push_back(s.find(tpl.positive_prefix));
    if (!expected[Sentiment::kNegative].empty()) {
      starts.push_back(s.find(expected[Sentiment::kPositive].empty() ? tpl.standalone_negative_prefix
                                                                     : tpl.negative_prefix));
    }
    if (!expected[Sentiment::kNeutral].empty()) starts.push_back(s.find(tpl.neutral_prefix));
    ASSERT_EQ(starts.front(), 0u);
    EXPECT_TRUE(std::is_sorted(starts.begin(), starts.end()));
  }
}

}  // namespace
}  // namespace stfact
