// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

/// Statement-level factuality metrics.
///
/// With n generated statements s'_k (from e') and m reference statements s_l
/// (from e):
///
///   St2Exp-P = mean_k judge(s'_k, e)      St2Exp-R = mean_l judge(s_l, e')
///   StEnt-P  = mean_k max_l E(s'_k, s_l)  StEnt-R  = mean_l max_k E(s_l, s'_k)
///   StCoh-*  = same with E - C in place of E
///   F1       = 2PR / (P + R), 0 when P + R = 0
///
/// E(a, b) and C(a, b) are the NLI entailment / contradiction probabilities
/// with premise a and hypothesis b. Sums run in index order so results are
/// bit-reproducible.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stfact/backends.hpp"

namespace stfact {

double harmonic_f1(double p, double r);

struct St2ExpScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // n = 0
  std::vector<double> generated_scores;  // judge(s'_k, e)
  std::vector<double> reference_scores;  // judge(s_l, e')
};

/// Throws Error(kPrecondition) when ref_statements is empty.
St2ExpScores st2exp(std::span<const std::string> gen_statements,
                    std::span<const std::string> ref_statements, std::string_view gen_text,
                    std::string_view ref_text, Judge& judge, std::string_view prompt_template_id = {});

/// Row-major n x m (generated x reference) and m x n (reference x generated)
/// probability tables.
struct AlignmentMatrix {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> ent;      // [k * m + l]: premise s'_k, hypothesis s_l
  std::vector<double> con;
  std::vector<double> ent_rev;  // [l * n + k]: premise s_l, hypothesis s'_k
  std::vector<double> con_rev;

  AlignmentMatrix() = default;
  AlignmentMatrix(std::size_t n_, std::size_t m_)
      : n(n_), m(m_), ent(n_ * m_), con(n_ * m_), ent_rev(n_ * m_), con_rev(n_ * m_) {}

  double& e(std::size_t k, std::size_t l) { return ent[k * m + l]; }
  double& c(std::size_t k, std::size_t l) { return con[k * m + l]; }
  double& e_rev(std::size_t l, std::size_t k) { return ent_rev[l * n + k]; }
  double& c_rev(std::size_t l, std::size_t k) { return con_rev[l * n + k]; }
  double e(std::size_t k, std::size_t l) const { return ent[k * m + l]; }
  double c(std::size_t k, std::size_t l) const { return con[k * m + l]; }
  double e_rev(std::size_t l, std::size_t k) const { return ent_rev[l * n + k]; }
  double c_rev(std::size_t l, std::size_t k) const { return con_rev[l * n + k]; }
};

/// 2nm classify calls, in (k, l) order. Throws Error(kPrecondition) on m = 0.
AlignmentMatrix nli_alignment(std::span<const std::string> gen_statements,
                              std::span<const std::string> ref_statements, NliBackend& nli);

inline constexpr std::size_t kNoAlignment = static_cast<std::size_t>(-1);

struct NliScores {
  std::optional<double> stent_p;
  double stent_r = 0.0;
  std::optional<double> stent_f1;
  std::optional<double> stcoh_p;
  double stcoh_r = -1.0;
  // Only when both coherence P and R are strictly positive.
  std::optional<double> stcoh_f1;
  bool degenerate = false;

  // Best counterpart per statement (lowest index on ties), kNoAlignment when
  // there is no counterpart.
  std::vector<std::size_t> ent_precision_argmax;  // per generated k -> l
  std::vector<std::size_t> ent_recall_argmax;     // per reference l -> k
  std::vector<std::size_t> coh_precision_argmax;
  std::vector<std::size_t> coh_recall_argmax;
};

/// n = 0: precision fields null, stent_r = 0, stcoh_r = -1, degenerate set.
/// Throws Error(kPrecondition) on m = 0 or inconsistent table sizes.
NliScores stent_stcoh(const AlignmentMatrix& matrix);

/// Sample Pearson correlation. Throws Error(kPrecondition) on size mismatch
/// or fewer than two points, Error(kUndefinedCorrelation) on constant input.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Neumaier-compensated sum in the given order.
double compensated_sum(std::span<const double> xs);

}  // namespace stfact
