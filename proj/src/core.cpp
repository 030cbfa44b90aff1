// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stfact/digest.hpp"
#include "stfact/error.hpp"
#include "stfact/text.hpp"

namespace stfact {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config-error";
    case ErrorKind::kInput: return "input-error";
    case ErrorKind::kCorpusCorrupt: return "corpus-corrupt";
    case ErrorKind::kIncompatibleBenchmark: return "incompatible-benchmark";
    case ErrorKind::kIdJoinFailure: return "id-join-failure";
    case ErrorKind::kEmptyStatement: return "empty-statement";
    case ErrorKind::kInvalidSentiment: return "invalid-sentiment";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kPrecondition: return "precondition-violation";
    case ErrorKind::kElicitationIncomplete: return "elicitation-incomplete";
    case ErrorKind::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::kBackendUnavailable: return "backend-unavailable";
    case ErrorKind::kHttpStatus: return "http-status";
    case ErrorKind::kBackendProtocol: return "backend-protocol";
    case ErrorKind::kInvariant: return "invariant-violation";
  }
  return "unknown-error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 1;
    case ErrorKind::kInput:
    case ErrorKind::kCorpusCorrupt:
    case ErrorKind::kIncompatibleBenchmark:
    case ErrorKind::kIdJoinFailure:
      return 2;
    case ErrorKind::kBackendUnavailable:
    case ErrorKind::kHttpStatus:
    case ErrorKind::kBackendProtocol:
    case ErrorKind::kElicitationIncomplete:
      return 3;
    default:
      return 4;
  }
}

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::kPositive: return "positive";
    case Sentiment::kNegative: return "negative";
    case Sentiment::kNeutral: return "neutral";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view label) {
  std::string_view t = text::trim(label);
  for (Sentiment s : kSentiments) {
    if (text::iequals(t, to_string(s))) return s;
  }
  return std::nullopt;
}

std::string make_interaction_id(std::string_view user_id, std::string_view item_id,
                                std::optional<std::int64_t> timestamp,
                                std::string_view review_text) {
  std::string buf;
  append_length_prefixed(buf, user_id);
  append_length_prefixed(buf, item_id);
  append_length_prefixed(buf, timestamp ? std::to_string(*timestamp) : std::string());
  const Sha256 review_digest = sha256(review_text);
  buf.append(reinterpret_cast<const char*>(review_digest.data()), review_digest.size());
  const Sha256 id = sha256(buf);
  return to_hex(std::span<const std::uint8_t>(id.data(), 12));
}

Interaction make_interaction(std::string user_id, std::string item_id, double rating,
                             std::string review_text, std::optional<std::int64_t> timestamp) {
  Interaction it;
  it.interaction_id = make_interaction_id(user_id, item_id, timestamp, review_text);
  it.user_id = std::move(user_id);
  it.item_id = std::move(item_id);
  it.rating = rating;
  it.review_text = std::move(review_text);
  it.timestamp = timestamp;
  return it;
}

namespace {

std::string normalize_topic(std::string_view topic) {
  return text::to_lower(text::collapse_whitespace(topic));
}

}  // namespace

void validate(const DomainConfig& cfg) {
  if (cfg.topics.empty()) throw Error(ErrorKind::kConfig, "domain config has no topics");
  std::unordered_set<std::string> seen;
  for (const auto& t : cfg.topics) {
    if (t.empty()) throw Error(ErrorKind::kConfig, "empty topic label");
    if (t != normalize_topic(t)) {
      throw Error(ErrorKind::kConfig, "topic not case-normalized: '" + t + "'");
    }
    if (t == kOtherTopic) {
      throw Error(ErrorKind::kConfig, "'other' is reserved and cannot be a configured topic");
    }
    if (!seen.insert(t).second) throw Error(ErrorKind::kConfig, "duplicate topic '" + t + "'");
  }
}

DomainConfig make_domain_config(DomainConfig cfg) {
  for (auto& t : cfg.topics) t = normalize_topic(t);
  validate(cfg);
  return cfg;
}

NliVerdict checked_verdict(double entailment, double neutral, double contradiction) {
  NliVerdict v{entailment, neutral, contradiction, false};
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  const double sum = entailment + neutral + contradiction;
  if (in_unit(entailment) && in_unit(neutral) && in_unit(contradiction) &&
      std::abs(sum - 1.0) <= kSimplexTolerance) {
    return v;
  }
  // Negative or non-finite mass is dropped; the rest is rescaled proportionally.
  auto clamp = [](double x) { return std::isfinite(x) ? std::max(x, 0.0) : 0.0; };
  v.entailment = clamp(entailment);
  v.neutral = clamp(neutral);
  v.contradiction = clamp(contradiction);
  const double total = v.entailment + v.neutral + v.contradiction;
  if (total <= 0.0) throw Error(ErrorKind::kBackendProtocol, "NLI verdict has no probability mass");
  v.entailment /= total;
  v.neutral /= total;
  v.contradiction /= total;
  v.renormalized = true;
  return v;
}

std::string normalize_statement(std::string_view input) {
  std::string s = text::to_lower(text::collapse_whitespace(input));
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' || s.back() == ' ')) {
    s.pop_back();
  }
  return s;
}

StatementTriplet validate_triplet(StatementTriplet t, const DomainConfig& cfg) {
  if (text::trim(t.statement).empty()) {
    throw Error(ErrorKind::kEmptyStatement, "statement is empty");
  }
  const std::string topic = normalize_topic(t.topic);
  if (topic == kOtherTopic) {
    t.topic = std::string(kOtherTopic);
    return t;
  }
  auto match = std::find(cfg.topics.begin(), cfg.topics.end(), topic);
  if (match != cfg.topics.end()) {
    t.topic = *match;
  } else {
    t.topic = std::string(kOtherTopic);
    t.flags.insert(std::string(flags::kTopicCoerced));
  }
  return t;
}

StatementTriplet validate_triplet(std::string statement, std::string topic,
                                  std::string_view sentiment_label, const DomainConfig& cfg) {
  auto sentiment = parse_sentiment(sentiment_label);
  if (!sentiment) {
    throw Error(ErrorKind::kInvalidSentiment, "'" + std::string(sentiment_label) + "'");
  }
  StatementTriplet t;
  t.statement = std::move(statement);
  t.topic = std::move(topic);
  t.sentiment = *sentiment;
  return validate_triplet(std::move(t), cfg);
}

}  // namespace stfact
