// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/backends.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "stfact/digest.hpp"
#include "stfact/error.hpp"
#include "stfact/text.hpp"

namespace stfact {

using nlohmann::json;

void validate(const BackendConfig& cfg) {
  if (cfg.model_id.empty()) throw Error(ErrorKind::kConfig, "backend model_id is empty");
  if (resolved_base_url(cfg).empty()) throw Error(ErrorKind::kConfig, "backend base_url is empty");
  if (cfg.max_in_flight < 1) throw Error(ErrorKind::kConfig, "max_in_flight must be >= 1");
  if (cfg.max_retries < 0) throw Error(ErrorKind::kConfig, "max_retries must be >= 0");
  if (!(cfg.timeout_seconds > 0)) throw Error(ErrorKind::kConfig, "timeout must be positive");
  if (cfg.temperature != 0.0) throw Error(ErrorKind::kConfig, "temperature must be 0.0");
  if (cfg.max_tokens < 1) throw Error(ErrorKind::kConfig, "max_tokens must be >= 1");
  if (cfg.retry_backoff_ms < 0) throw Error(ErrorKind::kConfig, "retry_backoff_ms must be >= 0");
}

std::string resolved_base_url(const BackendConfig& cfg) {
  if (!cfg.base_url_env_var.empty()) {
    if (const char* v = std::getenv(cfg.base_url_env_var.c_str()); v != nullptr && *v != '\0') {
      return v;
    }
  }
  return cfg.base_url;
}

HttpExecutor::HttpExecutor(BackendConfig cfg, std::shared_ptr<Transport> transport,
                           std::string default_path)
    : cfg_(std::move(cfg)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      in_flight_(std::max(1, cfg_.max_in_flight)) {
  validate(cfg_);
  auto [origin, prefix] = split_base_url(resolved_base_url(cfg_));
  origin_ = std::move(origin);
  path_ = prefix + (cfg_.endpoint_path.empty() ? default_path : cfg_.endpoint_path);
}

namespace {

class SemaphoreSlot {
 public:
  explicit SemaphoreSlot(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreSlot() { s_.release(); }
  SemaphoreSlot(const SemaphoreSlot&) = delete;
  SemaphoreSlot& operator=(const SemaphoreSlot&) = delete;

 private:
  std::counting_semaphore<>& s_;
};

bool retryable(const HttpResponse& r) { return r.status == 0 || r.status == 429 || r.status >= 500; }

}  // namespace

std::string HttpExecutor::post_json(const std::string& body) {
  HttpRequest req;
  req.origin = origin_;
  req.path = path_;
  req.body = body;
  req.timeout_seconds = cfg_.timeout_seconds;
  if (!cfg_.api_key_env_var.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env_var.c_str()); key != nullptr && *key != '\0') {
      req.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }

  std::string last_error;
  const int attempts = 1 + cfg_.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    HttpResponse res;
    {
      SemaphoreSlot slot(in_flight_);
      res = transport_->post(req);
    }
    if (res.status >= 200 && res.status < 300) return res.body;
    if (!retryable(res)) {
      throw Error(ErrorKind::kHttpStatus,
                  "HTTP " + std::to_string(res.status) + " from " + origin_ + path_ + ": " +
                      text::excerpt(res.body));
    }
    last_error = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
    if (attempt + 1 < attempts && cfg_.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.retry_backoff_ms) * (1 << std::min(attempt, 10)));
    }
  }
  throw Error(ErrorKind::kBackendUnavailable, origin_ + path_ + " failed after " +
                                                  std::to_string(attempts) + " attempt(s): " + last_error);
}

// ---------------------------------------------------------------------------
// Chat

std::string ChatBackend::complete(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw Error(ErrorKind::kPrecondition, "chat messages are empty");
  const auto& first = messages.front().role;
  if (first != "system" && first != "user") {
    throw Error(ErrorKind::kPrecondition, "first chat message must be system or user, got '" + first + "'");
  }
  return do_complete(messages);
}

std::string chat_request_body(std::span<const ChatMessage> messages, const BackendConfig& cfg) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", cfg.model_id},
               {"messages", std::move(msgs)},
               {"temperature", cfg.temperature},
               {"max_tokens", cfg.max_tokens}};
  return body.dump();
}

HttpChatClient::HttpChatClient(BackendConfig cfg, std::shared_ptr<Transport> transport,
                               std::shared_ptr<ResponseCache> cache)
    : executor_(std::move(cfg), std::move(transport), "/chat/completions"),
      cache_(cache ? std::move(cache) : ResponseCache::open(executor_.config().cache_path)) {}

std::string HttpChatClient::do_complete(std::span<const ChatMessage> messages) {
  const std::string body = chat_request_body(messages, executor_.config());
  const std::string key = cache_key("chat", sha256(body), model_id());
  if (auto hit = cache_->load(key)) return json::parse(*hit).at("content").get<std::string>();

  const std::string reply = executor_.post_json(body);
  std::string content;
  try {
    const json j = json::parse(reply);
    content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol,
                std::string("chat reply lacks choices[0].message.content: ") + e.what());
  }
  cache_->store(key, json{{"content", content}}.dump());
  return content;
}

StubChat::StubChat(std::vector<Rule> rules, std::string default_reply)
    : rules_(std::move(rules)), default_reply_(std::move(default_reply)) {}

std::vector<StubChat::Rule> StubChat::load_rules(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read stub fixtures " + path);
  std::vector<Rule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      rules.push_back({j.at("match").get<std::string>(), j.at("reply").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfig,
                  path + ":" + std::to_string(lineno) + ": bad stub rule: " + e.what());
    }
  }
  return rules;
}

std::string StubChat::do_complete(std::span<const ChatMessage> messages) {
  calls_.fetch_add(1);
  std::string_view last_user;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") {
      last_user = it->content;
      break;
    }
  }
  for (const auto& r : rules_) {
    if (last_user.find(r.match) != std::string_view::npos) return r.reply;
  }
  return default_reply_;
}

// ---------------------------------------------------------------------------
// Judge

std::optional<double> parse_judge_answer(std::string_view reply, JudgeScale scale) {
  const auto tokens = text::split_whitespace(reply);
  if (tokens.empty()) return std::nullopt;
  std::string_view tok = tokens.front();
  auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  while (!tok.empty() && !is_alpha(tok.front())) tok.remove_prefix(1);
  while (!tok.empty() && !is_alpha(tok.back())) tok.remove_suffix(1);
  if (text::iequals(tok, "yes")) return 1.0;
  if (text::iequals(tok, "no")) return 0.0;
  if (scale == JudgeScale::kTernary && text::iequals(tok, "partial")) return 0.5;
  return std::nullopt;
}

JudgePrompt JudgePrompt::defaults() {
  JudgePrompt p;
  p.system_text =
      "You are a meticulous fact-checking assistant. You decide whether a statement is "
      "supported by a reference text, using only the information in that text.";
  p.user_template =
      "Reference text:\n{context}\n\nStatement:\n{statement}\n\n"
      "Is the statement supported by the reference text? Answer strictly with one word: {answers}.";
  p.reask_text = "Your previous answer could not be read. Answer strictly with one word: {answers}.";
  return p;
}

JudgeScore Judge::judge(const JudgeRequest& request) {
  if (text::trim(request.statement).empty()) {
    throw Error(ErrorKind::kPrecondition, "judge statement is empty");
  }
  if (text::trim(request.context_text).empty()) {
    throw Error(ErrorKind::kPrecondition, "judge context is empty");
  }
  return do_judge(request);
}

LlmJudge::LlmJudge(std::shared_ptr<ChatBackend> chat, JudgePrompt prompt, JudgeScale scale,
                   std::shared_ptr<ResponseCache> cache)
    : chat_(std::move(chat)),
      prompt_(std::move(prompt)),
      scale_(scale),
      cache_(cache ? std::move(cache) : ResponseCache::in_memory()) {
  if (!chat_) throw Error(ErrorKind::kConfig, "LlmJudge needs a chat backend");
}

JudgeScore LlmJudge::do_judge(const JudgeRequest& request) {
  if (!request.prompt_template_id.empty() && request.prompt_template_id != prompt_.id) {
    throw Error(ErrorKind::kConfig, "judge prompt '" + request.prompt_template_id +
                                        "' requested, backend configured with '" + prompt_.id + "'");
  }
  const std::string_view answers = scale_ == JudgeScale::kBinary ? "yes or no" : "yes, partial or no";
  const json canonical = {{"context", request.context_text},
                          {"prompt_template_id", prompt_.id},
                          {"scale", scale_ == JudgeScale::kBinary ? "binary" : "ternary"},
                          {"statement", request.statement}};
  const std::string key = cache_key("judge", sha256(canonical.dump()), chat_->model_id());
  if (auto hit = cache_->load(key)) {
    const json j = json::parse(*hit);
    return {j.at("value").get<double>(), j.at("raw_label").get<std::string>(),
            j.at("parse_attempts").get<int>(), j.at("parse_failed").get<bool>()};
  }

  std::vector<ChatMessage> messages;
  if (!prompt_.system_text.empty()) messages.push_back({"system", prompt_.system_text});
  messages.push_back({"user", text::fill_template(prompt_.user_template,
                                                  {{"context", request.context_text},
                                                   {"statement", request.statement},
                                                   {"answers", answers}})});
  JudgeScore score;
  std::string reply = chat_->complete(messages);
  if (auto v = parse_judge_answer(reply, scale_)) {
    score = {*v, reply, 1, false};
  } else {
    messages.push_back({"assistant", reply});
    messages.push_back({"user", text::fill_template(prompt_.reask_text, {{"answers", answers}})});
    reply = chat_->complete(messages);
    if (auto v2 = parse_judge_answer(reply, scale_)) {
      score = {*v2, reply, 2, false};
    } else {
      score = {0.0, reply, 2, true};
    }
  }
  cache_->store(key, json{{"value", score.value},
                          {"raw_label", score.raw_label},
                          {"parse_attempts", score.parse_attempts},
                          {"parse_failed", score.parse_failed}}
                         .dump());
  return score;
}

JudgeScore StubJudge::do_judge(const JudgeRequest& request) {
  calls_.fetch_add(1);
  const std::string s = normalize_statement(request.statement);
  const std::string ctx = normalize_statement(request.context_text);
  const bool supported = !s.empty() && ctx.find(s) != std::string::npos;
  return {supported ? 1.0 : 0.0, supported ? "yes" : "no", 1, false};
}

// ---------------------------------------------------------------------------
// NLI

NliVerdict NliBackend::classify(std::string_view premise, std::string_view hypothesis) {
  if (text::trim(premise).empty()) throw Error(ErrorKind::kPrecondition, "NLI premise is empty");
  if (text::trim(hypothesis).empty()) throw Error(ErrorKind::kPrecondition, "NLI hypothesis is empty");
  return do_classify(premise, hypothesis);
}

std::string nli_request_body(std::string_view premise, std::string_view hypothesis) {
  return json{{"premise", premise}, {"hypothesis", hypothesis}}.dump();
}

namespace {

double number_at(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::kBackendProtocol, std::string("non-numeric ") + key);
  return v.get<double>();
}

void assign_label(double& e, double& n, double& c, std::string_view label, double score) {
  if (text::iequals(label, "entailment")) {
    e = score;
  } else if (text::iequals(label, "neutral")) {
    n = score;
  } else if (text::iequals(label, "contradiction")) {
    c = score;
  } else {
    throw Error(ErrorKind::kBackendProtocol, "unknown NLI label '" + std::string(label) + "'");
  }
}

}  // namespace

NliVerdict parse_nli_reply(std::string_view body, bool label_scores) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol, std::string("NLI reply is not JSON: ") + e.what());
  }
  try {
    if (j.is_object() && j.contains("entailment") && j.contains("neutral") && j.contains("contradiction")) {
      return checked_verdict(number_at(j, "entailment"), number_at(j, "neutral"),
                             number_at(j, "contradiction"));
    }
    if (label_scores) {
      double e = 0.0;
      double n = 0.0;
      double c = 0.0;
      if (j.is_array()) {
        for (const auto& item : j) {
          assign_label(e, n, c, item.at("label").get<std::string>(), number_at(item, "score"));
        }
        return checked_verdict(e, n, c);
      }
      if (j.is_object() && j.contains("labels") && j.contains("scores")) {
        const auto& labels = j.at("labels");
        const auto& scores = j.at("scores");
        if (!labels.is_array() || !scores.is_array() || labels.size() != scores.size()) {
          throw Error(ErrorKind::kBackendProtocol, "labels/scores arrays differ in length");
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (!scores[i].is_number()) throw Error(ErrorKind::kBackendProtocol, "non-numeric score");
          assign_label(e, n, c, labels[i].get<std::string>(), scores[i].get<double>());
        }
        return checked_verdict(e, n, c);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kBackendProtocol, std::string("bad NLI reply: ") + e.what());
  }
  throw Error(ErrorKind::kBackendProtocol, "NLI reply lacks entailment/neutral/contradiction: " +
                                               text::excerpt(body));
}

HttpNliClient::HttpNliClient(BackendConfig cfg, std::shared_ptr<Transport> transport,
                             std::shared_ptr<ResponseCache> cache)
    : executor_(std::move(cfg), std::move(transport), "/nli"),
      cache_(cache ? std::move(cache) : ResponseCache::open(executor_.config().cache_path)) {}

NliVerdict HttpNliClient::do_classify(std::string_view premise, std::string_view hypothesis) {
  const std::string body = nli_request_body(premise, hypothesis);
  const std::string key = cache_key("nli", sha256(body), executor_.config().model_id);
  if (auto hit = cache_->load(key)) {
    const json j = json::parse(*hit);
    return {j.at("entailment").get<double>(), j.at("neutral").get<double>(),
            j.at("contradiction").get<double>(), j.at("renormalized").get<bool>()};
  }
  const NliVerdict v = parse_nli_reply(executor_.post_json(body), executor_.config().nli_label_scores);
  cache_->store(key, json{{"entailment", v.entailment},
                          {"neutral", v.neutral},
                          {"contradiction", v.contradiction},
                          {"renormalized", v.renormalized}}
                         .dump());
  return v;
}

namespace {

// True when `longer` equals `shorter` with exactly one "not" token inserted.
bool differs_by_not(const std::vector<std::string>& longer, const std::vector<std::string>& shorter) {
  if (longer.size() != shorter.size() + 1) return false;
  for (std::size_t i = 0; i < longer.size(); ++i) {
    if (longer[i] != "not") continue;
    bool equal = true;
    for (std::size_t a = 0, b = 0; a < longer.size(); ++a) {
      if (a == i) continue;
      if (longer[a] != shorter[b++]) {
        equal = false;
        break;
      }
    }
    if (equal) return true;
  }
  return false;
}

}  // namespace

NliVerdict StubNli::do_classify(std::string_view premise, std::string_view hypothesis) {
  calls_.fetch_add(1);
  const std::string p = normalize_statement(premise);
  const std::string h = normalize_statement(hypothesis);
  if (p == h) return kIdentical;
  const auto pt = text::split_whitespace(p);
  const auto ht = text::split_whitespace(h);
  if (differs_by_not(pt, ht) || differs_by_not(ht, pt)) return kNegated;
  return kOther;
}

}  // namespace stfact
