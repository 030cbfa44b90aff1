// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/composer.hpp"

#include "stfact/error.hpp"

namespace stfact {

void validate(const ComposerTemplate& tpl) {
  const std::array<const std::string*, 4> prefixes{&tpl.positive_prefix, &tpl.negative_prefix,
                                                   &tpl.standalone_negative_prefix, &tpl.neutral_prefix};
  for (const auto* p : prefixes) {
    if (p->empty()) throw Error(ErrorKind::kConfig, "composer prefix is empty");
  }
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    for (std::size_t j = 0; j < prefixes.size(); ++j) {
      if (i != j && prefixes[j]->starts_with(*prefixes[i])) {
        throw Error(ErrorKind::kConfig,
                    "composer prefix '" + *prefixes[i] + "' is a prefix of '" + *prefixes[j] + "'");
      }
    }
  }
  if (tpl.list_joiner.empty() || tpl.final_joiner.empty() || tpl.sentence_terminator.empty()) {
    throw Error(ErrorKind::kConfig, "composer joiners and terminator must be non-empty");
  }
}

std::string lowercase_first(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'A' && out[0] <= 'Z') out[0] = static_cast<char>(out[0] - 'A' + 'a');
  return out;
}

std::string compose_explanation(std::span<const StatementTriplet> triplets, const ComposerTemplate& tpl) {
  if (triplets.empty()) throw Error(ErrorKind::kEmptyInput, "no triplets to compose");

  ComposedGroups groups;
  for (const auto& t : triplets) groups[t.sentiment].push_back(lowercase_first(t.statement));

  std::string out;
  bool have_positive = false;
  for (Sentiment s : kSentiments) {
    const auto& items = groups[s];
    if (items.empty()) continue;
    const std::string* prefix = &tpl.neutral_prefix;
    if (s == Sentiment::kPositive) {
      prefix = &tpl.positive_prefix;
      have_positive = true;
    } else if (s == Sentiment::kNegative) {
      prefix = have_positive ? &tpl.negative_prefix : &tpl.standalone_negative_prefix;
    }
    if (!out.empty()) out.push_back(' ');
    out += *prefix;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += (i + 1 == items.size()) ? tpl.final_joiner : tpl.list_joiner;
      out += items[i];
    }
    out += tpl.sentence_terminator;
  }
  return out;
}

std::vector<std::string> ComposedGroups::statements() const {
  std::vector<std::string> out;
  for (const auto& g : by_sentiment) out.insert(out.end(), g.begin(), g.end());
  return out;
}

namespace {

std::vector<std::string> split_statements(std::string_view body, const ComposerTemplate& tpl) {
  const auto last = body.rfind(tpl.final_joiner);
  if (last == std::string_view::npos) return {std::string(body)};
  std::vector<std::string> out;
  std::string_view head = body.substr(0, last);
  while (true) {
    const auto cut = head.find(tpl.list_joiner);
    if (cut == std::string_view::npos) {
      out.emplace_back(head);
      break;
    }
    out.emplace_back(head.substr(0, cut));
    head.remove_prefix(cut + tpl.list_joiner.size());
  }
  out.emplace_back(body.substr(last + tpl.final_joiner.size()));
  return out;
}

}  // namespace

std::optional<ComposedGroups> parse_composed(std::string_view text, const ComposerTemplate& tpl) {
  ComposedGroups groups;
  std::size_t pos = 0;
  int next_stage = 0;  // sentiment groups still allowed, in order
  bool have_positive = false;
  bool any = false;

  auto prefix_for = [&](int stage) -> const std::string& {
    switch (stage) {
      case 0: return tpl.positive_prefix;
      case 1: return have_positive ? tpl.negative_prefix : tpl.standalone_negative_prefix;
      default: return tpl.neutral_prefix;
    }
  };

  while (pos < text.size()) {
    const std::string_view rest = text.substr(pos);
    int stage = -1;
    for (int s = next_stage; s < 3; ++s) {
      if (rest.starts_with(prefix_for(s))) {
        stage = s;
        break;
      }
    }
    if (stage < 0) return std::nullopt;
    if (stage == 0) have_positive = true;

    const std::size_t body_start = pos + prefix_for(stage).size();
    // The sentence ends at the earliest "terminator + space + later prefix".
    std::size_t body_end = std::string_view::npos;
    std::size_t next_pos = text.size();
    for (int later = stage + 1; later < 3; ++later) {
      const std::string boundary = tpl.sentence_terminator + " " + prefix_for(later);
      const auto at = text.find(boundary, body_start);
      if (at != std::string_view::npos && at < body_end) {
        body_end = at;
        next_pos = at + tpl.sentence_terminator.size() + 1;
      }
    }
    if (body_end == std::string_view::npos) {
      if (!text.ends_with(tpl.sentence_terminator) ||
          text.size() < body_start + tpl.sentence_terminator.size()) {
        return std::nullopt;
      }
      body_end = text.size() - tpl.sentence_terminator.size();
      next_pos = text.size();
    }
    const std::string_view body = text.substr(body_start, body_end - body_start);
    if (body.empty()) return std::nullopt;
    auto items = split_statements(body, tpl);
    for (const auto& item : items) {
      if (item.empty()) return std::nullopt;
    }
    groups.by_sentiment[stage] = std::move(items);
    any = true;
    next_stage = stage + 1;
    pos = next_pos;
  }
  if (!any) return std::nullopt;
  return groups;
}

}  // namespace stfact
