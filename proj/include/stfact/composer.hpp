// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

/// Rule-based ground-truth composition: triplets are grouped by sentiment and
/// each group becomes one sentence, emitted positive, negative, neutral.
///
///   The user would appreciate this product because a, b and c.
///   However, they may dislike that d.
///   They seem indifferent to e.
///
/// Statements are inserted verbatim apart from lowercasing their first
/// character, so every statement can be located again in the paragraph and
/// parse_composed() can invert the composition.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stfact/core.hpp"

namespace stfact {

struct ComposerTemplate {
  std::string positive_prefix = "The user would appreciate this product because ";
  std::string negative_prefix = "However, they may dislike that ";
  // Used for the negative group when no positive sentence precedes it.
  std::string standalone_negative_prefix = "They may dislike that ";
  std::string neutral_prefix = "They seem indifferent to ";
  std::string list_joiner = ", ";
  std::string final_joiner = " and ";
  std::string sentence_terminator = ".";
};

/// Prefixes must be non-empty and none may be a prefix of another.
/// Throws Error(kConfig).
void validate(const ComposerTemplate& tpl);

/// Lowercases the first byte when it is an ASCII capital.
std::string lowercase_first(std::string_view s);

/// Throws Error(kEmptyInput) for an empty triplet list.
std::string compose_explanation(std::span<const StatementTriplet> triplets,
                                const ComposerTemplate& tpl = {});

struct ComposedGroups {
  std::array<std::vector<std::string>, 3> by_sentiment;

  std::vector<std::string>& operator[](Sentiment s) { return by_sentiment[static_cast<int>(s)]; }
  const std::vector<std::string>& operator[](Sentiment s) const {
    return by_sentiment[static_cast<int>(s)];
  }
  /// Statements in paragraph order (positive, negative, neutral).
  std::vector<std::string> statements() const;

  bool operator==(const ComposedGroups&) const = default;
};

/// nullopt means the text is not in composer format (callers fall back to
/// LLM extraction).
std::optional<ComposedGroups> parse_composed(std::string_view text, const ComposerTemplate& tpl = {});

}  // namespace stfact
