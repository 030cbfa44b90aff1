// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stfact/core.hpp"

namespace stfact {

enum class Rank { kNone, kBest, kSecond, kWorst };

std::string_view to_string(Rank r);

struct AggregateCell {
  std::string model;
  std::string dataset;
  std::string metric;
  std::optional<double> mean;  // over non-degenerate values; nullopt when count == 0
  std::optional<double> std;   // population
  std::size_t count = 0;
  std::size_t degenerate_count = 0;
  Rank rank = Rank::kNone;
};

enum class Granularity { kModelDataset, kInteraction };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view text);

struct CorrelationRequest {
  std::string metric_x;
  std::string metric_y;
};

/// Parses "X:Y".
std::optional<CorrelationRequest> parse_correlation_request(std::string_view text);

struct CorrelationPoint {
  std::string model;
  std::string dataset;
  std::string interaction_id;  // empty at model-dataset granularity
  double x = 0.0;
  double y = 0.0;
};

struct CorrelationResult {
  std::string metric_x;
  std::string metric_y;
  Granularity granularity = Granularity::kModelDataset;
  std::optional<double> r;  // nullopt renders as "n/a"
  std::vector<CorrelationPoint> points;
};

struct AggregateReport {
  std::vector<std::string> models;    // first appearance
  std::vector<std::string> datasets;  // first appearance
  std::vector<std::string> metrics;   // canonical order
  std::vector<AggregateCell> cells;   // dataset, metric, model order
  std::vector<CorrelationResult> correlations;

  const AggregateCell* find(std::string_view model, std::string_view dataset, std::string_view metric) const;
};

struct ReportOptions {
  std::vector<CorrelationRequest> correlations;
  Granularity granularity = Granularity::kModelDataset;
  bool include_stcoh_f1 = false;
};

/// Known metric names first in presentation order, then the rest sorted.
std::vector<std::string> canonical_metric_order(std::vector<std::string> names);

/// Means and population std use compensated sums over values in ascending
/// interaction_id order. Ranking per (dataset, metric) by descending mean,
/// ties by model name: best and worst when two models have a mean, plus
/// second when three or more do.
AggregateReport aggregate(std::span<const MetricRecord> records, const ReportOptions& options = {});

/// One row per model x metric x dataset.
std::string render_csv(const AggregateReport& report);
/// One JSON object per line: aggregate cells, then correlations.
std::string render_jsonl(const AggregateReport& report);
/// Per-dataset tables, mean<sub>std</sub> with rank markers.
std::string render_markdown(const AggregateReport& report);
/// metric_x,metric_y,granularity,r,point_count
std::string render_correlations_csv(const AggregateReport& report);
/// Scatter points for external plotting.
std::string render_correlation_points_csv(const AggregateReport& report);

}  // namespace stfact
