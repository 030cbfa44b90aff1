// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "stfact/error.hpp"
#include "stfact/text.hpp"

namespace stfact {

double harmonic_f1(double p, double r) {
  const double denom = p + r;
  if (denom == 0.0) return 0.0;
  // Keeps rounding from pushing the mean outside [min(p, r), max(p, r)].
  return std::clamp(2.0 * p * r / denom, std::min(p, r), std::max(p, r));
}

namespace {

double mean_in_order(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

St2ExpScores st2exp(std::span<const std::string> gen_statements,
                    std::span<const std::string> ref_statements, std::string_view gen_text,
                    std::string_view ref_text, Judge& judge, std::string_view prompt_template_id) {
  if (ref_statements.empty()) throw Error(ErrorKind::kPrecondition, "St2Exp needs at least one reference statement");
  St2ExpScores out;
  const std::string tpl(prompt_template_id);

  for (const auto& s : gen_statements) {
    out.generated_scores.push_back(judge.judge({s, std::string(ref_text), tpl}).value);
  }
  const bool empty_generation = text::trim(gen_text).empty();
  for (const auto& s : ref_statements) {
    out.reference_scores.push_back(empty_generation ? 0.0 : judge.judge({s, std::string(gen_text), tpl}).value);
  }

  out.degenerate = gen_statements.empty();
  out.precision = out.degenerate ? 0.0 : mean_in_order(out.generated_scores);
  out.recall = mean_in_order(out.reference_scores);
  out.f1 = harmonic_f1(out.precision, out.recall);
  return out;
}

AlignmentMatrix nli_alignment(std::span<const std::string> gen_statements,
                              std::span<const std::string> ref_statements, NliBackend& nli) {
  if (ref_statements.empty()) throw Error(ErrorKind::kPrecondition, "NLI alignment needs m >= 1");
  AlignmentMatrix mat(gen_statements.size(), ref_statements.size());
  for (std::size_t k = 0; k < mat.n; ++k) {
    for (std::size_t l = 0; l < mat.m; ++l) {
      const NliVerdict fwd = nli.classify(gen_statements[k], ref_statements[l]);
      mat.e(k, l) = fwd.entailment;
      mat.c(k, l) = fwd.contradiction;
      const NliVerdict rev = nli.classify(ref_statements[l], gen_statements[k]);
      mat.e_rev(l, k) = rev.entailment;
      mat.c_rev(l, k) = rev.contradiction;
    }
  }
  return mat;
}

NliScores stent_stcoh(const AlignmentMatrix& mat) {
  const std::size_t n = mat.n;
  const std::size_t m = mat.m;
  if (m == 0) throw Error(ErrorKind::kPrecondition, "stent_stcoh needs m >= 1");
  const std::size_t cells = n * m;
  if (mat.ent.size() != cells || mat.con.size() != cells || mat.ent_rev.size() != cells ||
      mat.con_rev.size() != cells) {
    throw Error(ErrorKind::kPrecondition, "alignment tables do not match n x m");
  }

  NliScores out;
  out.degenerate = n == 0;

  // Precision: each generated statement against its best reference.
  if (n > 0) {
    double ent_sum = 0.0;
    double coh_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t best_e = 0;
      std::size_t best_c = 0;
      double max_e = mat.e(k, 0);
      double max_c = mat.e(k, 0) - mat.c(k, 0);
      for (std::size_t l = 1; l < m; ++l) {
        const double e = mat.e(k, l);
        const double coh = e - mat.c(k, l);
        if (e > max_e) {
          max_e = e;
          best_e = l;
        }
        if (coh > max_c) {
          max_c = coh;
          best_c = l;
        }
      }
      ent_sum += max_e;
      coh_sum += max_c;
      out.ent_precision_argmax.push_back(best_e);
      out.coh_precision_argmax.push_back(best_c);
    }
    out.stent_p = ent_sum / static_cast<double>(n);
    out.stcoh_p = coh_sum / static_cast<double>(n);
  }

  // Recall: each reference statement against its best generated statement;
  // an empty generation contributes 0 (entailment) and -1 (coherence).
  double ent_sum = 0.0;
  double coh_sum = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    if (n == 0) {
      coh_sum += -1.0;
      out.ent_recall_argmax.push_back(kNoAlignment);
      out.coh_recall_argmax.push_back(kNoAlignment);
      continue;
    }
    std::size_t best_e = 0;
    std::size_t best_c = 0;
    double max_e = mat.e_rev(l, 0);
    double max_c = mat.e_rev(l, 0) - mat.c_rev(l, 0);
    for (std::size_t k = 1; k < n; ++k) {
      const double e = mat.e_rev(l, k);
      const double coh = e - mat.c_rev(l, k);
      if (e > max_e) {
        max_e = e;
        best_e = k;
      }
      if (coh > max_c) {
        max_c = coh;
        best_c = k;
      }
    }
    ent_sum += max_e;
    coh_sum += max_c;
    out.ent_recall_argmax.push_back(best_e);
    out.coh_recall_argmax.push_back(best_c);
  }
  out.stent_r = ent_sum / static_cast<double>(m);
  out.stcoh_r = coh_sum / static_cast<double>(m);

  if (out.stent_p) out.stent_f1 = harmonic_f1(*out.stent_p, out.stent_r);
  if (out.stcoh_p && *out.stcoh_p > 0.0 && out.stcoh_r > 0.0) {
    out.stcoh_f1 = harmonic_f1(*out.stcoh_p, out.stcoh_r);
  }
  return out;
}

double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::kPrecondition, "pearson_r: length mismatch");
  if (xs.size() < 2) throw Error(ErrorKind::kPrecondition, "pearson_r: needs at least two points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw Error(ErrorKind::kUndefinedCorrelation, "constant input");
  const double n = static_cast<double>(xs.size());
  const double mx = compensated_sum(xs) / n;
  const double my = compensated_sum(ys) / n;
  std::vector<double> sxy;
  std::vector<double> sxx;
  std::vector<double> syy;
  sxy.reserve(xs.size());
  sxx.reserve(xs.size());
  syy.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy.push_back(dx * dy);
    sxx.push_back(dx * dx);
    syy.push_back(dy * dy);
  }
  const double vx = compensated_sum(sxx);
  const double vy = compensated_sum(syy);
  if (vx == 0.0 || vy == 0.0) throw Error(ErrorKind::kUndefinedCorrelation, "constant input");
  const double r = compensated_sum(sxy) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace stfact
