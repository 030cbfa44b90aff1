// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stfact/core.hpp"

namespace stfact {

// ---------------------------------------------------------------------------
// Review ingestion (Amazon Reviews 2014 line-delimited JSON)

struct IngestStats {
  std::size_t lines = 0;  // non-blank lines
  std::size_t interactions = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
};

inline constexpr double kMaxMalformedFraction = 0.10;

/// Streams interactions in file order to `sink`. Field mapping:
/// reviewerID -> user_id, asin -> item_id, overall -> rating,
/// reviewText -> review_text, unixReviewTime -> timestamp (optional).
/// Malformed lines (including blank review text) are skipped and counted;
/// lines repeating an interaction id are dropped as duplicates.
/// Throws Error(kInput) on an unreadable file and Error(kCorpusCorrupt) when
/// more than kMaxMalformedFraction of the lines are malformed.
IngestStats ingest_reviews(const std::string& path, const std::function<void(Interaction&&)>& sink);

std::vector<Interaction> ingest_reviews(const std::string& path, IngestStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
  double train_fraction = 0.745;
  double valid_fraction = 0.090;
  double test_fraction = 0.165;
  std::uint64_t seed = 0;
};

/// Throws Error(kConfig) unless every fraction is in (0,1) and they sum to 1
/// within 1e-9.
void validate(const SplitSpec& spec);

struct CorpusSplit {
  std::vector<BenchmarkRecord> train;
  std::vector<BenchmarkRecord> valid;
  std::vector<BenchmarkRecord> test;
};

/// Realized sizes: valid = round(N * valid_fraction), test = round(N *
/// test_fraction), train takes the remainder. Independent of input order.
CorpusSplit split_corpus(std::vector<BenchmarkRecord> records, const SplitSpec& spec);

/// Uniform integers in [0, bound) by rejection over std::mt19937_64, whose
/// output sequence (unlike the std distributions) is fixed by the standard.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Statistics

struct SplitCounts {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
};

struct CorpusStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  std::optional<SplitCounts> splits;
  double avg_statements_per_interaction = 0.0;
  double avg_per_user = 0.0;
  double avg_per_item = 0.0;
  std::size_t unique_statements = 0;
  std::size_t total_statements = 0;
};

CorpusStats compute_stats(std::span<const BenchmarkRecord> records,
                          std::optional<SplitCounts> splits = std::nullopt);

std::string stats_to_json(const CorpusStats& stats);

// ---------------------------------------------------------------------------
// Benchmark files

inline constexpr int kBenchmarkSchemaVersion = 1;

std::string serialize_record(const BenchmarkRecord& record);

/// Throws Error(kIncompatibleBenchmark) for another schema_version and
/// Error(kInput) for malformed lines.
BenchmarkRecord parse_record(std::string_view line);

void write_benchmark(const std::string& path, std::span<const BenchmarkRecord> records);
std::vector<BenchmarkRecord> read_benchmark(const std::string& path);

// ---------------------------------------------------------------------------
// Generated explanations, metric records, external scores

/// Lines {interaction_id, text}. The model name is `model_name` when given,
/// otherwise the file stem.
std::vector<GeneratedExplanation> read_generated(const std::string& path,
                                                 const std::string& model_name = {});

std::string serialize_metric(const MetricRecord& record);
void write_metrics(const std::string& path, std::span<const MetricRecord> records);
std::vector<MetricRecord> read_metrics(const std::string& path);

/// Lines {interaction_id, metric_name, value[, model_name][, dataset]};
/// missing model/dataset fall back to the given defaults.
std::vector<MetricRecord> read_external_scores(const std::string& path, const std::string& default_model,
                                               const std::string& default_dataset);

std::string file_stem(const std::string& path);

}  // namespace stfact
