// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

/// Shared domain model: interactions, statement triplets, benchmark records,
/// NLI verdicts and per-interaction metric records, plus the two validation
/// rules every other module relies on (statement normalization and triplet
/// validation against a domain's topic set).

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stfact {

enum class Sentiment { kPositive = 0, kNegative = 1, kNeutral = 2 };

/// Fixed order of the sentiment label set, also the composer's group order.
inline constexpr std::array<Sentiment, 3> kSentiments{Sentiment::kPositive, Sentiment::kNegative,
                                                      Sentiment::kNeutral};

inline constexpr std::string_view kOtherTopic = "other";

namespace flags {
inline constexpr std::string_view kTopicCoerced = "topic_coerced";
}

std::string_view to_string(Sentiment s);

/// Case-insensitive, whitespace-trimmed lookup; nullopt for anything outside
/// {positive, negative, neutral}.
std::optional<Sentiment> parse_sentiment(std::string_view text);

struct Interaction {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  std::string review_text;
  std::optional<std::int64_t> timestamp;
  std::string interaction_id;

  bool operator==(const Interaction&) const = default;
};

/// Stable content hash of (user, item, timestamp, digest(review_text)).
std::string make_interaction_id(std::string_view user_id, std::string_view item_id,
                                std::optional<std::int64_t> timestamp,
                                std::string_view review_text);

Interaction make_interaction(std::string user_id, std::string item_id, double rating,
                             std::string review_text, std::optional<std::int64_t> timestamp);

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct StatementTriplet {
  std::string statement;
  std::string topic;
  Sentiment sentiment = Sentiment::kNeutral;
  std::optional<SourceSpan> source_span;
  std::set<std::string> flags;

  bool operator==(const StatementTriplet&) const = default;
};

struct FewShotExample {
  std::string review_text;
  std::vector<StatementTriplet> triplets;
};

struct DomainConfig {
  std::string domain_name;
  std::vector<std::string> topics;
  std::vector<FewShotExample> few_shot_examples;
  std::string prompt_template_id = "extract-v1";
  // Placeholders: {review} {topics} {sentiments} {examples} {domain}.
  std::string prompt_template;
  std::string system_prompt;
};

/// Normalizes topic spellings (trim, collapse, lowercase) and checks the
/// topic-set invariants. Throws Error(kConfig).
DomainConfig make_domain_config(DomainConfig cfg);
void validate(const DomainConfig& cfg);

struct ExtractionMeta {
  std::string backend_model_id;
  std::string prompt_template_id;
  std::int64_t extracted_at = 0;

  bool operator==(const ExtractionMeta&) const = default;
};

struct BenchmarkRecord {
  Interaction interaction;
  std::vector<StatementTriplet> triplets;
  std::string ground_truth_explanation;
  ExtractionMeta extraction_meta;
  // Unknown top-level fields from the file, name -> serialized JSON value.
  std::map<std::string, std::string> extra_fields;

  bool operator==(const BenchmarkRecord&) const = default;
};

struct GeneratedExplanation {
  std::string interaction_id;
  std::string model_name;
  std::string text;
  std::optional<std::vector<StatementTriplet>> extracted_triplets;
};

struct NliVerdict {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
  bool renormalized = false;
};

inline constexpr double kSimplexTolerance = 1e-4;

/// Returns the verdict unchanged when it lies on the probability simplex
/// (within kSimplexTolerance), otherwise drops negative mass, renormalizes and
/// sets `renormalized`. Throws Error(kBackendProtocol) when nothing is left
/// to normalize.
NliVerdict checked_verdict(double entailment, double neutral, double contradiction);

struct MetricRecord {
  std::string interaction_id;
  std::string model_name;
  std::string dataset;
  std::string metric_name;
  std::optional<double> value;
  bool degenerate = false;

  bool operator==(const MetricRecord&) const = default;
};

/// Case-fold, collapse whitespace, trim, drop trailing terminal punctuation.
std::string normalize_statement(std::string_view text);

/// Keeps the statement text intact; normalizes the topic to its configured
/// spelling or coerces it to "other" with flag topic_coerced.
/// Throws Error(kEmptyStatement).
StatementTriplet validate_triplet(StatementTriplet t, const DomainConfig& cfg);

/// Same, starting from an untyped sentiment label. Throws
/// Error(kInvalidSentiment) for labels outside the sentiment set.
StatementTriplet validate_triplet(std::string statement, std::string topic,
                                  std::string_view sentiment_label, const DomainConfig& cfg);

}  // namespace stfact
