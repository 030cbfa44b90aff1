// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stfact {

/// Lowercased tokens; ASCII punctuation and whitespace separate tokens and
/// are dropped. Bytes >= 0x80 count as token characters.
std::vector<std::string> overlap_tokens(std::string_view text);

struct NgramScores {
  double bleu4 = 0.0;
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;

  std::map<std::string, double> as_map() const;
};

/// Sentence BLEU-4 against one reference: clipped n-gram precisions up to
/// order min(4, |candidate|), uniform weights, brevity penalty. When any
/// order >= 2 has zero matches, orders >= 2 get add-one smoothing.
double sentence_bleu4(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

double rouge_n_f1(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, int n);

double rouge_l_f1(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

/// All-zero for an empty candidate.
NgramScores ngram_baselines(std::string_view candidate, std::string_view reference);

}  // namespace stfact
