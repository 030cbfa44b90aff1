// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/ngram.hpp"

#include <algorithm>
#include <cmath>

#include "stfact/text.hpp"

namespace stfact {

std::vector<std::string> overlap_tokens(std::string_view input) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : input) {
    const auto c = static_cast<unsigned char>(raw);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (word) {
      cur.push_back(text::to_lower(raw));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::map<std::string, double> NgramScores::as_map() const {
  return {{"BLEU-4", bleu4}, {"ROUGE-1", rouge1_f1}, {"ROUGE-2", rouge2_f1}, {"ROUGE-L", rougeL_f1}};
}

namespace {

using Counts = std::map<std::vector<std::string>, std::size_t>;

Counts ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  Counts out;
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                   toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

std::size_t clipped_overlap(const Counts& cand, const Counts& ref) {
  std::size_t total = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) total += std::min(count, it->second);
  }
  return total;
}

}  // namespace

double sentence_bleu4(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const std::size_t order = std::min<std::size_t>(4, candidate.size());

  std::vector<double> matches(order);
  std::vector<double> totals(order);
  for (std::size_t n = 1; n <= order; ++n) {
    matches[n - 1] = static_cast<double>(clipped_overlap(ngram_counts(candidate, n), ngram_counts(reference, n)));
    totals[n - 1] = static_cast<double>(candidate.size() - n + 1);
  }
  if (matches[0] == 0.0) return 0.0;
  const bool smooth = std::any_of(matches.begin() + 1, matches.end(), [](double m) { return m == 0.0; });

  double log_sum = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    const double add = (smooth && i > 0) ? 1.0 : 0.0;
    log_sum += std::log((matches[i] + add) / (totals[i] + add)) / static_cast<double>(order);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

double rouge_n_f1(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, int n) {
  const auto cand = ngram_counts(candidate, static_cast<std::size_t>(n));
  const auto ref = ngram_counts(reference, static_cast<std::size_t>(n));
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  for (const auto& kv : cand) cand_total += kv.second;
  for (const auto& kv : ref) ref_total += kv.second;
  const double overlap = static_cast<double>(clipped_overlap(cand, ref));
  const double p = overlap / static_cast<double>(std::max<std::size_t>(cand_total, 1));
  const double r = overlap / static_cast<double>(std::max<std::size_t>(ref_total, 1));
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double rouge_l_f1(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<std::size_t> prev(reference.size() + 1, 0);
  std::vector<std::size_t> cur(reference.size() + 1, 0);
  for (const auto& c : candidate) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = c == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[reference.size()]);
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

NgramScores ngram_baselines(std::string_view candidate, std::string_view reference) {
  const auto cand = overlap_tokens(candidate);
  const auto ref = overlap_tokens(reference);
  NgramScores out;
  if (cand.empty()) return out;
  out.bleu4 = sentence_bleu4(cand, ref);
  out.rouge1_f1 = rouge_n_f1(cand, ref, 1);
  out.rouge2_f1 = rouge_n_f1(cand, ref, 2);
  out.rougeL_f1 = rouge_l_f1(cand, ref);
  return out;
}

}  // namespace stfact
