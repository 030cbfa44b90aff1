// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/config.hpp"

#include <filesystem>
#include <fstream>

#include "stfact/error.hpp"

namespace stfact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, std::string("cannot read ") + what + " " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

void require_exists(const std::string& path, const char* what) {
  if (!path.empty() && !fs::exists(path)) {
    throw Error(ErrorKind::kConfig, std::string(what) + " does not exist: " + path);
  }
}

}  // namespace

BackendConfig parse_backend_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "backend config must be an object");
  BackendConfig b;
  try {
    take(j, "base_url", b.base_url);
    take(j, "model_id", b.model_id);
    take(j, "api_key_env_var", b.api_key_env_var);
    take(j, "base_url_env_var", b.base_url_env_var);
    take(j, "endpoint_path", b.endpoint_path);
    take(j, "timeout_seconds", b.timeout_seconds);
    take(j, "max_retries", b.max_retries);
    take(j, "max_in_flight", b.max_in_flight);
    take(j, "temperature", b.temperature);
    take(j, "max_tokens", b.max_tokens);
    take(j, "retry_backoff_ms", b.retry_backoff_ms);
    take(j, "cache_path", b.cache_path);
    take(j, "nli_label_scores", b.nli_label_scores);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("backend config: ") + e.what());
  }
  return b;
}

JudgePrompt load_judge_prompt(const std::string& path) {
  const json j = read_json_file(path, "judge prompt");
  JudgePrompt p = JudgePrompt::defaults();
  try {
    take(j, "id", p.id);
    take(j, "system_text", p.system_text);
    take(j, "user_template", p.user_template);
    take(j, "reask_text", p.reask_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }
  if (p.id.empty() || p.user_template.empty()) throw Error(ErrorKind::kConfig, path + ": id and user_template required");
  return p;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  const json j = read_json_file(path, "config");
  if (!j.is_object()) throw Error(ErrorKind::kConfig, path + ": config must be an object");
  const fs::path base = fs::absolute(path).parent_path();
  try {
    take(j, "domain_config", cfg.domain_config);
    if (auto b = j.find("backends"); b != j.end()) {
      if (auto e = b->find("extractor"); e != b->end()) cfg.extractor = parse_backend_config(*e);
      if (auto e = b->find("judge"); e != b->end()) cfg.judge = parse_backend_config(*e);
      if (auto e = b->find("nli"); e != b->end()) cfg.nli = parse_backend_config(*e);
    }
    take(j, "parallelism", cfg.parallelism);
    if (auto s = j.find("split"); s != j.end()) {
      take(*s, "train", cfg.split.train_fraction);
      take(*s, "valid", cfg.split.valid_fraction);
      take(*s, "test", cfg.split.test_fraction);
      take(*s, "seed", cfg.split.seed);
    }
    take(j, "report_formats", cfg.report_formats);
    if (auto c = j.find("composer"); c != j.end()) {
      take(*c, "positive_prefix", cfg.composer.positive_prefix);
      take(*c, "negative_prefix", cfg.composer.negative_prefix);
      take(*c, "standalone_negative_prefix", cfg.composer.standalone_negative_prefix);
      take(*c, "neutral_prefix", cfg.composer.neutral_prefix);
      take(*c, "list_joiner", cfg.composer.list_joiner);
      take(*c, "final_joiner", cfg.composer.final_joiner);
      take(*c, "sentence_terminator", cfg.composer.sentence_terminator);
    }
    take(j, "judge_prompt", cfg.judge_prompt);
    std::string scale = "binary";
    take(j, "judge_scale", scale);
    if (scale == "binary") {
      cfg.judge_scale = JudgeScale::kBinary;
    } else if (scale == "ternary") {
      cfg.judge_scale = JudgeScale::kTernary;
    } else {
      throw Error(ErrorKind::kConfig, "judge_scale must be binary or ternary");
    }
    take(j, "id_join_threshold", cfg.id_join_threshold);
    take(j, "include_stcoh_f1", cfg.include_stcoh_f1);
    if (auto s = j.find("stub"); s != j.end()) {
      take(*s, "chat_fixtures", cfg.stub_chat_fixtures);
      take(*s, "default_reply", cfg.stub_default_reply);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig, path + ": " + e.what());
  }

  cfg.domain_config = resolve(base, cfg.domain_config);
  cfg.judge_prompt = resolve(base, cfg.judge_prompt);
  cfg.stub_chat_fixtures = resolve(base, cfg.stub_chat_fixtures);
  for (auto* b : {&cfg.extractor, &cfg.judge, &cfg.nli}) {
    if (*b) (*b)->cache_path = resolve(base, (*b)->cache_path);
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (cfg.parallelism < 1) throw Error(ErrorKind::kConfig, "parallelism must be >= 1");
  for (const auto& f : cfg.report_formats) {
    if (f != "csv" && f != "json" && f != "markdown") throw Error(ErrorKind::kConfig, "unknown report format: " + f);
  }
  if (!(cfg.id_join_threshold >= 0.0 && cfg.id_join_threshold <= 1.0)) {
    throw Error(ErrorKind::kConfig, "id_join_threshold must lie in [0,1]");
  }
  validate(cfg.split);
  validate(cfg.composer);
  require_exists(cfg.domain_config, "domain_config");
  require_exists(cfg.judge_prompt, "judge_prompt");
  require_exists(cfg.stub_chat_fixtures, "stub.chat_fixtures");
}

}  // namespace stfact
