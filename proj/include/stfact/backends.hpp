// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

/// Scoring contracts used by extraction and evaluation:
///
///  * ChatBackend – chat-completion transport (extraction, topic elicitation,
///    LLM judging).
///  * Judge – statement-vs-context factual consistency score in [0,1].
///  * NliBackend – (entailment, neutral, contradiction) for a directed pair.
///
/// Each contract has a network implementation (HTTP + persistent cache +
/// bounded in-flight requests) and a deterministic stub for hermetic runs.

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stfact/cache.hpp"
#include "stfact/core.hpp"
#include "stfact/transport.hpp"

namespace stfact {

struct BackendConfig {
  std::string base_url;
  std::string model_id;
  std::string api_key_env_var;
  std::string base_url_env_var;  // when set in the environment, overrides base_url
  std::string endpoint_path;     // appended to base_url; client-specific default when empty
  double timeout_seconds = 60.0;
  int max_retries = 3;
  int max_in_flight = 4;
  double temperature = 0.0;
  int max_tokens = 512;
  int retry_backoff_ms = 200;
  std::string cache_path;
  bool nli_label_scores = false;  // accept label/score arrays instead of named fields
};

/// Throws Error(kConfig) on max_in_flight < 1, non-zero temperature, etc.
void validate(const BackendConfig& cfg);

/// base_url after the environment override.
std::string resolved_base_url(const BackendConfig& cfg);

/// POSTs JSON with retry, timeout and a max_in_flight bound. Shared by the
/// chat and NLI clients.
class HttpExecutor {
 public:
  HttpExecutor(BackendConfig cfg, std::shared_ptr<Transport> transport, std::string default_path);

  /// Returns the body of a 2xx reply. Throws Error(kBackendUnavailable) once
  /// retries are exhausted and Error(kHttpStatus) for non-retryable statuses.
  std::string post_json(const std::string& body);

  const BackendConfig& config() const { return cfg_; }

 private:
  BackendConfig cfg_;
  std::shared_ptr<Transport> transport_;
  std::string origin_;
  std::string path_;
  std::counting_semaphore<> in_flight_;
};

// ---------------------------------------------------------------------------
// Chat

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Throws Error(kPrecondition) when messages is empty or does not start
  /// with a system or user turn.
  std::string complete(std::span<const ChatMessage> messages);

  virtual std::string model_id() const = 0;

 protected:
  virtual std::string do_complete(std::span<const ChatMessage> messages) = 0;
};

/// Canonical chat-completions request body (sorted keys, compact).
std::string chat_request_body(std::span<const ChatMessage> messages, const BackendConfig& cfg);

class HttpChatClient final : public ChatBackend {
 public:
  HttpChatClient(BackendConfig cfg, std::shared_ptr<Transport> transport,
                 std::shared_ptr<ResponseCache> cache);

  std::string model_id() const override { return executor_.config().model_id; }

 protected:
  std::string do_complete(std::span<const ChatMessage> messages) override;

 private:
  HttpExecutor executor_;
  std::shared_ptr<ResponseCache> cache_;
};

/// Scripted chat backend. The first rule whose `match` text occurs in the
/// last user message supplies the reply; otherwise `default_reply`.
class StubChat final : public ChatBackend {
 public:
  struct Rule {
    std::string match;
    std::string reply;
  };

  explicit StubChat(std::vector<Rule> rules = {}, std::string default_reply = "[]");

  /// Loads rules from JSONL lines {"match": ..., "reply": ...}.
  static std::vector<Rule> load_rules(const std::string& path);

  std::string model_id() const override { return "stub-chat"; }
  std::uint64_t calls() const { return calls_.load(); }

 protected:
  std::string do_complete(std::span<const ChatMessage> messages) override;

 private:
  std::vector<Rule> rules_;
  std::string default_reply_;
  std::atomic<std::uint64_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Judge

struct JudgeRequest {
  std::string statement;
  std::string context_text;
  std::string prompt_template_id;
};

struct JudgeScore {
  double value = 0.0;
  std::string raw_label;
  int parse_attempts = 1;
  bool parse_failed = false;
};

enum class JudgeScale {
  kBinary,   // yes -> 1, no -> 0
  kTernary,  // yes -> 1, partial -> 0.5, no -> 0
};

/// Reads the first token of a judge reply, case-insensitively.
std::optional<double> parse_judge_answer(std::string_view reply, JudgeScale scale);

struct JudgePrompt {
  std::string id = "seval-yesno-v1";
  std::string system_text;
  std::string user_template;  // {statement} and {context}
  std::string reask_text;

  static JudgePrompt defaults();
};

class Judge {
 public:
  virtual ~Judge() = default;

  /// Throws Error(kPrecondition) when statement or context is empty.
  JudgeScore judge(const JudgeRequest& request);

 protected:
  virtual JudgeScore do_judge(const JudgeRequest& request) = 0;
};

class LlmJudge final : public Judge {
 public:
  LlmJudge(std::shared_ptr<ChatBackend> chat, JudgePrompt prompt = JudgePrompt::defaults(),
           JudgeScale scale = JudgeScale::kBinary, std::shared_ptr<ResponseCache> cache = nullptr);

  const JudgePrompt& prompt() const { return prompt_; }

 protected:
  JudgeScore do_judge(const JudgeRequest& request) override;

 private:
  std::shared_ptr<ChatBackend> chat_;
  JudgePrompt prompt_;
  JudgeScale scale_;
  std::shared_ptr<ResponseCache> cache_;
};

/// 1.0 iff the normalized statement is a substring of the normalized context.
class StubJudge final : public Judge {
 public:
  std::uint64_t calls() const { return calls_.load(); }

 protected:
  JudgeScore do_judge(const JudgeRequest& request) override;

 private:
  std::atomic<std::uint64_t> calls_{0};
};

// ---------------------------------------------------------------------------
// NLI

class NliBackend {
 public:
  virtual ~NliBackend() = default;

  /// Premise entails hypothesis; direction matters. Throws
  /// Error(kPrecondition) on empty strings.
  NliVerdict classify(std::string_view premise, std::string_view hypothesis);

 protected:
  virtual NliVerdict do_classify(std::string_view premise, std::string_view hypothesis) = 0;
};

/// Canonical NLI request body {"hypothesis":..., "premise":...}.
std::string nli_request_body(std::string_view premise, std::string_view hypothesis);

/// Parses an NLI reply. Named fields by default; with `label_scores`, also
/// [{label, score}, ...] or {labels: [...], scores: [...]}.
NliVerdict parse_nli_reply(std::string_view body, bool label_scores);

class HttpNliClient final : public NliBackend {
 public:
  HttpNliClient(BackendConfig cfg, std::shared_ptr<Transport> transport,
                std::shared_ptr<ResponseCache> cache);

 protected:
  NliVerdict do_classify(std::string_view premise, std::string_view hypothesis) override;

 private:
  HttpExecutor executor_;
  std::shared_ptr<ResponseCache> cache_;
};

/// Deterministic NLI stub:
///  identical normalized strings        -> (0.98, 0.01, 0.01)
///  equal up to one inserted "not" token -> (0.01, 0.01, 0.98)
///  anything else                       -> (0.10, 0.80, 0.10)
class StubNli final : public NliBackend {
 public:
  static constexpr NliVerdict kIdentical{0.98, 0.01, 0.01, false};
  static constexpr NliVerdict kNegated{0.01, 0.01, 0.98, false};
  static constexpr NliVerdict kOther{0.10, 0.80, 0.10, false};

  std::uint64_t calls() const { return calls_.load(); }

 protected:
  NliVerdict do_classify(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace stfact
