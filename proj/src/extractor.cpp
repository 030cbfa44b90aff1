// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/extractor.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "stfact/error.hpp"
#include "stfact/text.hpp"

namespace stfact {

using nlohmann::json;

const char* const kDefaultExtractionSystemPrompt =
    "You are an information extraction assistant. You read product reviews and list the "
    "reviewer's atomic explanatory statements.";

const char* const kDefaultExtractionTemplate =
    "Extract every atomic explanatory statement from the {domain} review below.\n"
    "An atomic statement is a short, self-contained clause expressing the reviewer's opinion "
    "about exactly one attribute of the item. Ignore content that does not explain the "
    "reviewer's opinion, such as gift stories, shopping habits or advice to other buyers.\n"
    "Assign each statement one topic from this list, or \"other\" if none fits: {topics}.\n"
    "Assign each statement one sentiment from this list: {sentiments}.\n\n"
    "{examples}"
    "Review:\n{review}";

const char* const kExtractionSchemaNote =
    "Reply only with a JSON array of objects with the keys \"statement\", \"topic\" and "
    "\"sentiment\", in the order the statements appear in the review. Reply with [] when the "
    "review contains no explanatory statement.";

const char* const kExtractionReask =
    "Your previous reply could not be parsed. Reply again with only the JSON array of "
    "{\"statement\", \"topic\", \"sentiment\"} objects and nothing else.";

std::vector<ChatMessage> ExtractionPrompt::messages() const {
  std::vector<ChatMessage> out;
  if (!system_text.empty()) out.push_back({"system", system_text});
  out.push_back({"user", output_schema_note.empty() ? user_text : user_text + "\n\n" + output_schema_note});
  return out;
}

namespace {

json triplets_to_json(const std::vector<StatementTriplet>& triplets) {
  json arr = json::array();
  for (const auto& t : triplets) {
    arr.push_back({{"statement", t.statement}, {"topic", t.topic}, {"sentiment", to_string(t.sentiment)}});
  }
  return arr;
}

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace

ExtractionPrompt build_extraction_prompt(std::string_view review, const DomainConfig& cfg) {
  std::vector<std::string> sentiments;
  for (Sentiment s : kSentiments) sentiments.emplace_back(to_string(s));
  const std::string topics = join(cfg.topics, ", ");
  const std::string sentiment_list = join(sentiments, ", ");

  std::string examples;
  for (const auto& ex : cfg.few_shot_examples) {
    examples += "Example review:\n" + ex.review_text + "\nExample output:\n" +
                triplets_to_json(ex.triplets).dump() + "\n\n";
  }

  ExtractionPrompt p;
  p.system_text = cfg.system_prompt.empty() ? kDefaultExtractionSystemPrompt : cfg.system_prompt;
  const std::string_view tpl =
      cfg.prompt_template.empty() ? std::string_view(kDefaultExtractionTemplate) : cfg.prompt_template;
  p.user_text = text::fill_template(tpl, {{"review", review},
                                          {"topics", topics},
                                          {"sentiments", sentiment_list},
                                          {"examples", examples},
                                          {"domain", cfg.domain_name}});
  p.output_schema_note = kExtractionSchemaNote;
  return p;
}

DomainConfig load_domain_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read domain config " + path);
  DomainConfig cfg;
  try {
    const json j = json::parse(in);
    cfg.domain_name = j.at("domain_name").get<std::string>();
    cfg.topics = j.at("topics").get<std::vector<std::string>>();
    cfg.prompt_template_id = j.value("prompt_template_id", cfg.prompt_template_id);
    cfg.prompt_template = j.value("prompt_template", std::string());
    cfg.system_prompt = j.value("system_prompt", std::string());
    for (const auto& ex : j.value("few_shot_examples", json::array())) {
      FewShotExample fs;
      fs.review_text = ex.at("review").get<std::string>();
      for (const auto& t : ex.at("triplets")) {
        auto s = parse_sentiment(t.at("sentiment").get<std::string>());
        if (!s) throw Error(ErrorKind::kConfig, path + ": few-shot example has an invalid sentiment");
        fs.triplets.push_back({t.at("statement").get<std::string>(), t.at("topic").get<std::string>(), *s, {}, {}});
      }
      cfg.few_shot_examples.push_back(std::move(fs));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
  return make_domain_config(std::move(cfg));
}

// ---------------------------------------------------------------------------
// Reply parsing

namespace {

// Index of the bracket closing the one at `open`, skipping quoted strings
// ('...' as well as "..."); npos when the input ends first.
std::size_t matching_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (quote != 0) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return c == ']' ? i : std::string_view::npos;
    }
  }
  return std::string_view::npos;
}

// Single-quoted strings become double-quoted ones; commas directly before a
// closing bracket are dropped.
std::string lenient_rewrite(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      out.push_back(c);
      for (++i; i < s.size(); ++i) {
        out.push_back(s[i]);
        if (s[i] == '\\' && i + 1 < s.size()) {
          out.push_back(s[++i]);
        } else if (s[i] == '"') {
          break;
        }
      }
      continue;
    }
    if (c == '\'') {
      out.push_back('"');
      for (++i; i < s.size() && s[i] != '\''; ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          const char next = s[++i];
          if (next == '\'') {
            out.push_back('\'');
          } else {
            out.push_back('\\');
            out.push_back(next);
          }
        } else if (s[i] == '"') {
          out += "\\\"";
        } else {
          out.push_back(s[i]);
        }
      }
      out.push_back('"');
      continue;
    }
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && text::is_space(s[j])) ++j;
      if (j < s.size() && (s[j] == ']' || s[j] == '}')) continue;
    }
    out.push_back(c);
  }
  return out;
}

struct Attempt {
  bool ok = false;
  json value;
  std::size_t error_byte = 0;  // 0-based within the parsed segment
  std::string error;
};

Attempt try_parse(std::string_view segment) {
  Attempt a;
  try {
    a.value = json::parse(segment);
    a.ok = a.value.is_array();
    if (!a.ok) a.error = "top-level value is not an array";
  } catch (const json::parse_error& e) {
    a.error = e.what();
    a.error_byte = e.byte > 0 ? e.byte - 1 : 0;
  }
  return a;
}

}  // namespace

ReplyParse parse_extraction_reply(std::string_view raw) {
  ReplyParse out;
  bool have_error = false;
  std::size_t start = raw.find('[');
  if (start == std::string_view::npos) {
    out.error = "no JSON array in reply";
    out.error_offset = raw.size();
    return out;
  }
  for (; start != std::string_view::npos; start = raw.find('[', start + 1)) {
    const std::size_t close = matching_bracket(raw, start);
    const std::string_view segment =
        close == std::string_view::npos ? raw.substr(start) : raw.substr(start, close - start + 1);
    Attempt strict = try_parse(segment);
    if (strict.ok) {
      out.ok = true;
      out.items.assign(strict.value.begin(), strict.value.end());
      return out;
    }
    Attempt lenient = try_parse(lenient_rewrite(segment));
    if (lenient.ok) {
      out.ok = true;
      out.recovered = true;
      out.items.assign(lenient.value.begin(), lenient.value.end());
      return out;
    }
    if (!have_error) {
      have_error = true;
      out.error = strict.error;
      out.error_offset = std::min(raw.size(), start + strict.error_byte);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

std::optional<SourceSpan> locate(std::string_view review, std::string_view statement) {
  if (statement.empty()) return std::nullopt;
  if (auto at = review.find(statement); at != std::string_view::npos) {
    return SourceSpan{at, at + statement.size()};
  }
  const std::string lr = text::to_lower(review);
  const std::string ls = text::to_lower(statement);
  if (auto at = lr.find(ls); at != std::string::npos) return SourceSpan{at, at + ls.size()};
  return std::nullopt;
}

}  // namespace

ExtractionResult extract_triplets(std::string_view review, const DomainConfig& cfg, ChatBackend& backend) {
  if (text::trim(review).empty()) throw Error(ErrorKind::kPrecondition, "review text is empty");

  ExtractionResult result;
  std::vector<ChatMessage> messages = build_extraction_prompt(review, cfg).messages();
  result.raw_reply = backend.complete(messages);
  result.attempts = 1;
  ReplyParse parsed = parse_extraction_reply(result.raw_reply);
  if (!parsed.ok) {
    messages.push_back({"assistant", result.raw_reply});
    messages.push_back({"user", kExtractionReask});
    result.raw_reply = backend.complete(messages);
    result.attempts = 2;
    parsed = parse_extraction_reply(result.raw_reply);
    if (!parsed.ok) {
      result.failed = true;
      result.failure_reason =
          "parse-failure at byte " + std::to_string(parsed.error_offset) + ": " + parsed.error;
      return result;
    }
  }

  for (const auto& item : parsed.items) {
    const auto is_str = [&](const char* k) { return item.contains(k) && item[k].is_string(); };
    if (!item.is_object() || !is_str("statement") || !is_str("topic") || !is_str("sentiment")) {
      result.dropped.push_back({item.dump(), "malformed-item"});
      continue;
    }
    try {
      StatementTriplet t = validate_triplet(text::collapse_whitespace(item["statement"].get<std::string>()),
                                            item["topic"].get<std::string>(),
                                            item["sentiment"].get<std::string>(), cfg);
      t.source_span = locate(review, t.statement);
      result.triplets.push_back(std::move(t));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidSentiment && e.kind() != ErrorKind::kEmptyStatement) throw;
      result.dropped.push_back({item.dump(), std::string(to_string(e.kind()))});
    }
  }
  return result;
}

std::vector<std::string> elicit_topics(std::string_view domain_name,
                                       const std::vector<std::string>& sample_reviews, int k,
                                       ChatBackend& backend) {
  if (k < 1) throw Error(ErrorKind::kPrecondition, "k must be >= 1");
  if (sample_reviews.empty()) throw Error(ErrorKind::kPrecondition, "no sample reviews");

  std::ostringstream user;
  user << "Below are sample reviews from the " << domain_name << " domain.\n"
       << "List the " << k << " most important topics (item attributes) that reviewers use to "
       << "justify their opinions in this domain. Use short lowercase labels such as \"fit\" or "
       << "\"material\"; do not include \"other\".\n\n";
  for (std::size_t i = 0; i < sample_reviews.size(); ++i) {
    user << "Review " << (i + 1) << ":\n" << sample_reviews[i] << "\n\n";
  }
  user << "Reply only with a JSON array of exactly " << k << " distinct topic labels.";

  const std::vector<ChatMessage> messages{
      {"system", "You are a domain analyst who summarizes what customers care about."},
      {"user", user.str()}};
  const std::string reply = backend.complete(messages);

  std::vector<std::string> raw_labels;
  const ReplyParse parsed = parse_extraction_reply(reply);
  if (parsed.ok) {
    for (const auto& item : parsed.items) {
      if (item.is_string()) raw_labels.push_back(item.get<std::string>());
    }
  } else {
    // Plain list fallback: one label per line or comma, bullets and numbering stripped.
    std::string current;
    auto flush = [&] {
      std::string_view t = text::trim(current);
      while (!t.empty() && (t.front() == '-' || t.front() == '*' || t.front() == '.' ||
                            t.front() == ')' || (t.front() >= '0' && t.front() <= '9'))) {
        t = text::trim(t.substr(1));
      }
      if (!t.empty()) raw_labels.emplace_back(t);
      current.clear();
    };
    for (char c : reply) {
      if (c == '\n' || c == ',') {
        flush();
      } else {
        current.push_back(c);
      }
    }
    flush();
  }

  std::vector<std::string> topics;
  std::unordered_set<std::string> seen;
  for (const auto& label : raw_labels) {
    std::string t = text::to_lower(text::collapse_whitespace(label));
    if (t.empty() || t == kOtherTopic || !seen.insert(t).second) continue;
    topics.push_back(std::move(t));
    if (static_cast<int>(topics.size()) == k) return topics;
  }
  throw Error(ErrorKind::kElicitationIncomplete, "expected " + std::to_string(k) +
                                                     " distinct topics, got " + std::to_string(topics.size()));
}

}  // namespace stfact
