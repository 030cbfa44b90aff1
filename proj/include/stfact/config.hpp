// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "stfact/backends.hpp"
#include "stfact/composer.hpp"
#include "stfact/datasets.hpp"

namespace stfact {

/// Run configuration, loaded from JSON. Relative paths are resolved against
/// the directory of the config file.
///
///   {
///     "domain_config": "domains/toys.json",
///     "backends": {"extractor": {...}, "judge": {...}, "nli": {...}},
///     "parallelism": 4,
///     "split": {"train": 0.745, "valid": 0.09, "test": 0.165, "seed": 0},
///     "report_formats": ["csv", "json", "markdown"],
///     "composer": {"positive_prefix": ..., ...},
///     "judge_prompt": "prompts/judge.json",
///     "judge_scale": "binary",
///     "id_join_threshold": 0.05,
///     "include_stcoh_f1": false,
///     "stub": {"chat_fixtures": "stub_chat.jsonl", "default_reply": "[]"}
///   }
///
/// Backend objects carry the BackendConfig field names.
struct RunConfig {
  std::string domain_config;
  std::optional<BackendConfig> extractor;
  std::optional<BackendConfig> judge;
  std::optional<BackendConfig> nli;
  int parallelism = 1;
  SplitSpec split;
  std::vector<std::string> report_formats{"csv", "json", "markdown"};
  ComposerTemplate composer;
  std::string judge_prompt;  // path; built-in prompt when empty
  JudgeScale judge_scale = JudgeScale::kBinary;
  double id_join_threshold = 0.05;
  bool include_stcoh_f1 = false;
  std::string stub_chat_fixtures;
  std::string stub_default_reply = "[]";
};

/// Defaults when path is empty. Throws Error(kConfig) on unreadable or
/// invalid documents and on referenced paths that do not exist.
RunConfig load_run_config(const std::string& path);

/// parallelism >= 1, formats known, threshold in [0,1], split valid,
/// composer valid, referenced paths exist. Throws Error(kConfig).
void validate(const RunConfig& cfg);

BackendConfig parse_backend_config(const nlohmann::json& j);

/// Loads {id, system_text, user_template, reask_text}; missing fields keep
/// the built-in defaults.
JudgePrompt load_judge_prompt(const std::string& path);

}  // namespace stfact
