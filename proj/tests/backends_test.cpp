// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "stfact/backends.hpp"
#include "stfact/digest.hpp"
#include "stfact/error.hpp"

namespace stfact {
namespace {

constexpr const char* kTable1Paragraph =
    "The user would appreciate this product because the design is really cute. However, they may dislike "
    "that the material feels cheap. They seem indifferent to it runs true to size.";

class ScriptedChat : public ChatBackend {
 public:
  explicit ScriptedChat(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string model_id() const override { return "scripted"; }
  std::vector<std::vector<ChatMessage>> seen;

 protected:
  std::string do_complete(std::span<const ChatMessage> messages) override {
    seen.emplace_back(messages.begin(), messages.end());
    if (replies_.empty()) return "";
    std::string r = replies_.front();
    replies_.pop_front();
    return r;
  }

 private:
  std::deque<std::string> replies_;
};

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "stfact_backends_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / (name + "_" + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p.string();
}

TEST(StubJudge, SubstringRule) {
  StubJudge judge;
  EXPECT_EQ(judge.judge({"the material feels cheap", kTable1Paragraph, ""}).value, 1.0);
  EXPECT_EQ(judge.judge({"The Material feels cheap.", kTable1Paragraph, ""}).value, 1.0);
  EXPECT_EQ(judge.judge({"the battery lasts weeks", kTable1Paragraph, ""}).value, 0.0);
  EXPECT_EQ(judge.calls(), 3u);
}

TEST(Judge, RejectsEmptyFields) {
  StubJudge judge;
  EXPECT_THROW(judge.judge({"", "ctx", ""}), Error);
  EXPECT_THROW(judge.judge({"s", "  ", ""}), Error);
}

TEST(StubNli, Rules) {
  StubNli nli;
  const auto same = nli.classify("The design is cute.", "the design is cute");
  EXPECT_EQ(same.entailment, 0.98);
  EXPECT_EQ(same.contradiction, 0.01);
  const auto neg = nli.classify("the design is not cute", "the design is cute");
  EXPECT_EQ(neg.contradiction, 0.98);
  const auto neg_rev = nli.classify("the design is cute", "the design is not cute");
  EXPECT_EQ(neg_rev.contradiction, 0.98);
  const auto other = nli.classify("the design is cute", "the fabric is thin");
  EXPECT_EQ(other.neutral, 0.80);
  EXPECT_EQ(nli.classify("not the design is cute", "the design is cute").contradiction, 0.98);
  EXPECT_EQ(nli.classify("the design is not not cute", "the design is cute").neutral, 0.80);
  for (const auto& v : {StubNli::kIdentical, StubNli::kNegated, StubNli::kOther}) {
    EXPECT_NEAR(v.entailment + v.neutral + v.contradiction, 1.0, 1e-12);
  }
  EXPECT_THROW(nli.classify("", "x"), Error);
}

TEST(StubChat, RulesAgainstLastUserMessage) {
  StubChat chat({{"sweater", "[1]"}, {"leggings", "[2]"}}, "[]");
  std::vector<ChatMessage> m{{"system", "leggings"}, {"user", "a sweater review"}};
  EXPECT_EQ(chat.complete(m), "[1]");
  m.push_back({"assistant", "x"});
  m.push_back({"user", "nothing relevant"});
  EXPECT_EQ(chat.complete(m), "[]");
  EXPECT_EQ(chat.calls(), 2u);
}

TEST(ChatBackend, MessagePreconditions) {
  StubChat chat;
  std::vector<ChatMessage> empty;
  EXPECT_THROW(chat.complete(empty), Error);
  std::vector<ChatMessage> bad{{"assistant", "hi"}};
  EXPECT_THROW(chat.complete(bad), Error);
}

TEST(StubChat, LoadRules) {
  const std::string p = temp_path("rules.jsonl");
  std::ofstream(p) << R"({"match":"a","reply":"x"})" << "\n\n" << R"({"match":"b","reply":"y"})" << "\n";
  const auto rules = StubChat::load_rules(p);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[1].reply, "y");
}

TEST(JudgeAnswer, Parsing) {
  EXPECT_EQ(parse_judge_answer("Yes", JudgeScale::kBinary), 1.0);
  EXPECT_EQ(parse_judge_answer("  no, not supported", JudgeScale::kBinary), 0.0);
  EXPECT_EQ(parse_judge_answer("YES.", JudgeScale::kBinary), 1.0);
  EXPECT_FALSE(parse_judge_answer("partial", JudgeScale::kBinary));
  EXPECT_EQ(parse_judge_answer("Partial", JudgeScale::kTernary), 0.5);
  EXPECT_FALSE(parse_judge_answer("maybe yes", JudgeScale::kBinary));
  EXPECT_FALSE(parse_judge_answer("", JudgeScale::kBinary));
}

TEST(LlmJudge, PromptAndCache) {
  auto chat = std::make_shared<ScriptedChat>(std::deque<std::string>{"Yes"});
  auto cache = ResponseCache::in_memory();
  LlmJudge judge(chat, JudgePrompt::defaults(), JudgeScale::kBinary, cache);
  const JudgeRequest req{"the material feels cheap", kTable1Paragraph, "seval-yesno-v1"};
  const auto first = judge.judge(req);
  EXPECT_EQ(first.value, 1.0);
  EXPECT_EQ(first.parse_attempts, 1);
  ASSERT_EQ(chat->seen.size(), 1u);
  const auto& user = chat->seen[0].back().content;
  EXPECT_NE(user.find(kTable1Paragraph), std::string::npos);
  EXPECT_NE(user.find("the material feels cheap"), std::string::npos);
  EXPECT_NE(user.find("yes or no"), std::string::npos);

  const auto second = judge.judge(req);
  EXPECT_EQ(chat->seen.size(), 1u);
  EXPECT_EQ(second.value, first.value);
  EXPECT_EQ(second.raw_label, first.raw_label);
}

TEST(LlmJudge, ReaskThenFlag) {
  auto chat = std::make_shared<ScriptedChat>(std::deque<std::string>{"Hmm", "No"});
  LlmJudge judge(chat);
  const auto s = judge.judge({"x", "y", ""});
  EXPECT_EQ(s.value, 0.0);
  EXPECT_EQ(s.parse_attempts, 2);
  EXPECT_FALSE(s.parse_failed);
  ASSERT_EQ(chat->seen.size(), 2u);
  EXPECT_EQ(chat->seen[1].size(), chat->seen[0].size() + 2);
  EXPECT_EQ(chat->seen[1][chat->seen[0].size()].role, "assistant");

  auto chat2 = std::make_shared<ScriptedChat>(std::deque<std::string>{"Hmm", "Still unsure"});
  LlmJudge judge2(chat2);
  const auto f = judge2.judge({"x", "y", ""});
  EXPECT_EQ(f.value, 0.0);
  EXPECT_TRUE(f.parse_failed);
  EXPECT_EQ(f.parse_attempts, 2);
}

TEST(LlmJudge, TemplateIdMismatchIsConfigError) {
  auto chat = std::make_shared<ScriptedChat>(std::deque<std::string>{"Yes"});
  LlmJudge judge(chat);
  try {
    judge.judge({"x", "y", "another-prompt"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(NliReply, Formats) {
  const auto named = parse_nli_reply(R"({"entailment":0.7,"neutral":0.2,"contradiction":0.1})", false);
  EXPECT_EQ(named.entailment, 0.7);
  EXPECT_THROW(parse_nli_reply(R"([{"label":"ENTAILMENT","score":0.9}])", false), Error);
  const auto arr = parse_nli_reply(
      R"([{"label":"ENTAILMENT","score":0.6},{"label":"Neutral","score":0.3},{"label":"contradiction","score":0.1}])",
      true);
  EXPECT_EQ(arr.entailment, 0.6);
  EXPECT_EQ(arr.contradiction, 0.1);
  const auto cols =
      parse_nli_reply(R"({"labels":["contradiction","entailment","neutral"],"scores":[0.2,0.5,0.3]})", true);
  EXPECT_EQ(cols.contradiction, 0.2);
  EXPECT_EQ(cols.entailment, 0.5);
  const auto renorm = parse_nli_reply(R"({"entailment":2,"neutral":1,"contradiction":1})", false);
  EXPECT_TRUE(renorm.renormalized);
  EXPECT_DOUBLE_EQ(renorm.entailment, 0.5);
  EXPECT_THROW(parse_nli_reply("not json", false), Error);
  EXPECT_THROW(parse_nli_reply(R"({"entailment":"high","neutral":0,"contradiction":0})", false), Error);
}

TEST(RequestBodies, Canonical) {
  BackendConfig cfg;
  cfg.model_id = "m";
  cfg.max_tokens = 16;
  std::vector<ChatMessage> msgs{{"system", "s"}, {"user", "u \"q\""}};
  EXPECT_EQ(chat_request_body(msgs, cfg),
            R"({"max_tokens":16,"messages":[{"content":"s","role":"system"},{"content":"u \"q\"","role":"user"}],)"
            R"("model":"m","temperature":0.0})");
  EXPECT_EQ(nli_request_body("p", "h"), R"({"hypothesis":"h","premise":"p"})");
}

TEST(CacheKey, Separation) {
  const auto d = sha256("payload");
  EXPECT_EQ(cache_key("judge", d, "m1"), cache_key("judge", d, "m1"));
  EXPECT_NE(cache_key("judge", d, "m1"), cache_key("judge", d, "m2"));
  EXPECT_NE(cache_key("judge", d, "m1"), cache_key("nli", d, "m1"));
  EXPECT_NE(cache_key("judge", sha256("other"), "m1"), cache_key("judge", d, "m1"));
  // Kind/model boundaries cannot be shifted.
  EXPECT_NE(cache_key("ab", d, "c"), cache_key("a", d, "bc"));
}

TEST(ResponseCache, PersistsAcrossInstancesAndSkipsTornLines) {
  const std::string p = temp_path("cache.jsonl");
  {
    ResponseCache c(p);
    c.store("k1", "v1");
    c.store("k2", R"({"x":1})");
    c.store("k1", "v1b");
  }
  {
    std::ofstream(p, std::ios::app) << R"({"k":"k3","v":"trunc)";
  }
  ResponseCache c(p);
  EXPECT_EQ(c.load("k1"), "v1b");
  EXPECT_EQ(c.load("k2"), R"({"x":1})");
  EXPECT_FALSE(c.load("k3"));
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.hits(), 2u);
}

TEST(ResponseCache, OpenSharesInstancePerPath) {
  const std::string p = temp_path("shared.jsonl");
  auto a = ResponseCache::open(p);
  auto b = ResponseCache::open(p);
  EXPECT_EQ(a.get(), b.get());
  auto m1 = ResponseCache::open("");
  auto m2 = ResponseCache::open("");
  EXPECT_NE(m1.get(), m2.get());
}

TEST(ResponseCache, ConcurrentWriters) {
  const std::string p = temp_path("concurrent.jsonl");
  {
    auto c = ResponseCache::open(p);
    std::vector<std::thread> ts;
    for (int t = 0; t < 8; ++t) {
      ts.emplace_back([&, t] {
        for (int i = 0; i < 200; ++i) c->store(std::to_string(t) + ":" + std::to_string(i), std::string(50, 'x'));
      });
    }
    for (auto& t : ts) t.join();
  }
  ResponseCache reread(p);
  EXPECT_EQ(reread.size(), 1600u);
}

// Counts concurrent posts; used to observe the max_in_flight bound.
class CountingTransport : public Transport {
 public:
  std::mutex mu;
  int current = 0;
  int peak = 0;
  int total = 0;
  HttpResponse post(const HttpRequest&) override {
    {
      std::lock_guard l(mu);
      ++total;
      peak = std::max(peak, ++current);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(15));
    {
      std::lock_guard l(mu);
      --current;
    }
    return {200, R"({"choices":[{"message":{"role":"assistant","content":"ok"}}]})", ""};
  }
};

TEST(HttpExecutor, MaxInFlightWithInjectedTransport) {
  auto transport = std::make_shared<CountingTransport>();
  BackendConfig cfg;
  cfg.base_url = "http://unused.invalid/v1";
  cfg.model_id = "m";
  cfg.max_in_flight = 3;
  HttpChatClient client(cfg, transport, ResponseCache::in_memory());
  std::vector<std::thread> ts;
  for (int i = 0; i < 12; ++i) {
    ts.emplace_back([&, i] {
      std::vector<ChatMessage> m{{"user", "q" + std::to_string(i)}};
      EXPECT_EQ(client.complete(m), "ok");
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(transport->total, 12);
  EXPECT_LE(transport->peak, 3);
  EXPECT_GE(transport->peak, 2);
}

TEST(BackendConfig, Validation) {
  BackendConfig cfg;
  cfg.base_url = "http://x";
  cfg.model_id = "m";
  EXPECT_NO_THROW(validate(cfg));
  auto bad = cfg;
  bad.max_in_flight = 0;
  EXPECT_THROW(validate(bad), Error);
  bad = cfg;
  bad.temperature = 0.7;
  EXPECT_THROW(validate(bad), Error);
  bad = cfg;
  bad.model_id.clear();
  EXPECT_THROW(validate(bad), Error);
}

TEST(BackendConfig, BaseUrlEnvOverride) {
  BackendConfig cfg;
  cfg.base_url = "http://config";
  cfg.base_url_env_var = "STFACT_TEST_BASE_URL";
  ::unsetenv("STFACT_TEST_BASE_URL");
  EXPECT_EQ(resolved_base_url(cfg), "http://config");
  ::setenv("STFACT_TEST_BASE_URL", "http://env", 1);
  EXPECT_EQ(resolved_base_url(cfg), "http://env");
  ::unsetenv("STFACT_TEST_BASE_URL");
}

}  // namespace
}  // namespace stfact
