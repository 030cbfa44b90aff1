// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <cstddef>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "stfact/backends.hpp"
#include "stfact/core.hpp"

namespace stfact {

struct ExtractionPrompt {
  std::string system_text;
  std::string user_text;
  std::string output_schema_note;

  /// [system, user + "\n\n" + schema note]
  std::vector<ChatMessage> messages() const;
};

/// Default extraction template used when a domain config carries none.
extern const char* const kDefaultExtractionTemplate;
extern const char* const kDefaultExtractionSystemPrompt;
extern const char* const kExtractionSchemaNote;
extern const char* const kExtractionReask;

ExtractionPrompt build_extraction_prompt(std::string_view review, const DomainConfig& cfg);

/// Loads a domain config document (JSON):
/// {domain_name, topics, few_shot_examples: [{review, triplets: [...]}],
///  prompt_template_id, prompt_template, system_prompt}
DomainConfig load_domain_config(const std::string& path);

struct ReplyParse {
  bool ok = false;
  std::vector<nlohmann::json> items;
  std::size_t error_offset = 0;  // byte offset into the raw reply
  std::string error;
  bool recovered = false;  // lenient pass was needed
};

/// Locates the outermost JSON array in a model reply (surrounding prose is
/// ignored) and returns its elements in order. A lenient pass converts
/// single-quoted strings and drops trailing commas before giving up.
ReplyParse parse_extraction_reply(std::string_view raw);

struct DroppedItem {
  std::string raw;     // serialized item
  std::string reason;  // invalid-sentiment | empty-statement | malformed-item
};

struct ExtractionResult {
  std::vector<StatementTriplet> triplets;
  std::vector<DroppedItem> dropped;
  std::string raw_reply;
  bool failed = false;
  std::string failure_reason;
  int attempts = 0;
};

/// One re-ask on an unparseable reply; after that the result is marked
/// failed with empty triplets. Backend errors propagate.
ExtractionResult extract_triplets(std::string_view review, const DomainConfig& cfg, ChatBackend& backend);

/// Asks for a shortlist of k topics. Returns exactly k distinct normalized
/// labels (first k in reply order). Throws Error(kElicitationIncomplete).
std::vector<std::string> elicit_topics(std::string_view domain_name,
                                       const std::vector<std::string>& sample_reviews, int k,
                                       ChatBackend& backend);

}  // namespace stfact
