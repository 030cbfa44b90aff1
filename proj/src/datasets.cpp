// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <unordered_set>

#include "stfact/error.hpp"
#include "stfact/text.hpp"

namespace stfact {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, "cannot read " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInput, "cannot write " + path);
  return out;
}

std::string where(const std::string& path, std::size_t lineno) {
  return path + ":" + std::to_string(lineno);
}

std::optional<Interaction> interaction_from_review(const json& j) {
  if (!j.is_object()) return std::nullopt;
  const auto str = [&](const char* k) -> const json* {
    auto it = j.find(k);
    return (it != j.end() && it->is_string()) ? &*it : nullptr;
  };
  const json* user = str("reviewerID");
  const json* item = str("asin");
  const json* review = str("reviewText");
  auto overall = j.find("overall");
  if (user == nullptr || item == nullptr || review == nullptr || overall == j.end() || !overall->is_number()) {
    return std::nullopt;
  }
  std::string review_text = review->get<std::string>();
  if (text::trim(review_text).empty()) return std::nullopt;
  std::optional<std::int64_t> ts;
  if (auto t = j.find("unixReviewTime"); t != j.end() && !t->is_null()) {
    if (!t->is_number_integer()) return std::nullopt;
    ts = t->get<std::int64_t>();
  }
  return make_interaction(user->get<std::string>(), item->get<std::string>(), overall->get<double>(),
                          std::move(review_text), ts);
}

}  // namespace

IngestStats ingest_reviews(const std::string& path, const std::function<void(Interaction&&)>& sink) {
  std::ifstream in = open_input(path);
  IngestStats stats;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    ++stats.lines;
    const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    auto interaction = interaction_from_review(j);
    if (!interaction) {
      ++stats.malformed;
      continue;
    }
    if (!seen.insert(interaction->interaction_id).second) {
      ++stats.duplicates;
      continue;
    }
    ++stats.interactions;
    sink(std::move(*interaction));
  }
  if (stats.lines > 0 &&
      static_cast<double>(stats.malformed) > kMaxMalformedFraction * static_cast<double>(stats.lines)) {
    throw Error(ErrorKind::kCorpusCorrupt, path + ": " + std::to_string(stats.malformed) + " of " +
                                               std::to_string(stats.lines) + " lines are malformed");
  }
  return stats;
}

std::vector<Interaction> ingest_reviews(const std::string& path, IngestStats* stats) {
  std::vector<Interaction> out;
  IngestStats s = ingest_reviews(path, [&](Interaction&& it) { out.push_back(std::move(it)); });
  if (stats != nullptr) *stats = s;
  return out;
}

// ---------------------------------------------------------------------------
// Splits

void validate(const SplitSpec& spec) {
  for (double f : {spec.train_fraction, spec.valid_fraction, spec.test_fraction}) {
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::kConfig, "split fractions must lie in (0,1)");
  }
  if (std::abs(spec.train_fraction + spec.valid_fraction + spec.test_fraction - 1.0) > 1e-9) {
    throw Error(ErrorKind::kConfig, "split fractions must sum to 1");
  }
}

std::uint64_t SplitRng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound representable as [0, limit).
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

CorpusSplit split_corpus(std::vector<BenchmarkRecord> records, const SplitSpec& spec) {
  validate(spec);
  if (records.empty()) throw Error(ErrorKind::kPrecondition, "cannot split an empty corpus");

  const auto by_id = [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
    return a.interaction.interaction_id < b.interaction.interaction_id;
  };
  std::stable_sort(records.begin(), records.end(), by_id);

  SplitRng rng(spec.seed);
  for (std::size_t i = records.size() - 1; i > 0; --i) {
    const std::size_t j = rng.below(i + 1);
    std::swap(records[i], records[j]);
  }

  const std::size_t n = records.size();
  std::size_t n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.valid_fraction));
  std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  n_valid = std::min(n_valid, n);
  n_test = std::min(n_test, n - n_valid);
  const std::size_t n_train = n - n_valid - n_test;

  CorpusSplit out;
  auto move_range = [&](std::vector<BenchmarkRecord>& dst, std::size_t from, std::size_t count) {
    dst.reserve(count);
    for (std::size_t i = from; i < from + count; ++i) dst.push_back(std::move(records[i]));
    std::stable_sort(dst.begin(), dst.end(), by_id);
  };
  move_range(out.train, 0, n_train);
  move_range(out.valid, n_train, n_valid);
  move_range(out.test, n_train + n_valid, n_test);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

CorpusStats compute_stats(std::span<const BenchmarkRecord> records, std::optional<SplitCounts> splits) {
  CorpusStats s;
  std::unordered_set<std::string> users;
  std::unordered_set<std::string> items;
  std::unordered_set<std::string> unique;
  for (const auto& r : records) {
    users.insert(r.interaction.user_id);
    items.insert(r.interaction.item_id);
    for (const auto& t : r.triplets) unique.insert(normalize_statement(t.statement));
    s.total_statements += r.triplets.size();
  }
  s.users = users.size();
  s.items = items.size();
  s.interactions = records.size();
  s.unique_statements = unique.size();
  s.splits = splits;
  const auto total = static_cast<double>(s.total_statements);
  auto avg = [&](std::size_t denom) { return denom == 0 ? 0.0 : total / static_cast<double>(denom); };
  s.avg_statements_per_interaction = avg(s.interactions);
  s.avg_per_user = avg(s.users);
  s.avg_per_item = avg(s.items);
  return s;
}

std::string stats_to_json(const CorpusStats& s) {
  json j = {{"users", s.users},
            {"items", s.items},
            {"interactions", s.interactions},
            {"avg_statements_per_interaction", s.avg_statements_per_interaction},
            {"avg_per_user", s.avg_per_user},
            {"avg_per_item", s.avg_per_item},
            {"unique_statements", s.unique_statements},
            {"total_statements", s.total_statements}};
  if (s.splits) {
    j["train"] = s.splits->train;
    j["valid"] = s.splits->valid;
    j["test"] = s.splits->test;
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Benchmark files

namespace {

const std::unordered_set<std::string>& known_record_fields() {
  static const std::unordered_set<std::string> kFields{
      "schema_version", "interaction_id", "user_id", "item_id", "rating", "review_text", "timestamp",
      "triplets", "ground_truth_explanation", "extraction_meta"};
  return kFields;
}

json triplet_to_json(const StatementTriplet& t) {
  json j = {{"statement", t.statement},
            {"topic", t.topic},
            {"sentiment", to_string(t.sentiment)},
            {"flags", json(std::vector<std::string>(t.flags.begin(), t.flags.end()))}};
  if (t.source_span) j["source_span"] = {t.source_span->begin, t.source_span->end};
  return j;
}

StatementTriplet triplet_from_json(const json& j) {
  StatementTriplet t;
  t.statement = j.at("statement").get<std::string>();
  t.topic = j.at("topic").get<std::string>();
  auto s = parse_sentiment(j.at("sentiment").get<std::string>());
  if (!s) throw Error(ErrorKind::kInput, "invalid sentiment in benchmark triplet");
  t.sentiment = *s;
  if (auto f = j.find("flags"); f != j.end()) {
    for (const auto& flag : *f) t.flags.insert(flag.get<std::string>());
  }
  if (auto sp = j.find("source_span"); sp != j.end() && !sp->is_null()) {
    t.source_span = SourceSpan{sp->at(0).get<std::size_t>(), sp->at(1).get<std::size_t>()};
  }
  return t;
}

}  // namespace

std::string serialize_record(const BenchmarkRecord& r) {
  json triplets = json::array();
  for (const auto& t : r.triplets) triplets.push_back(triplet_to_json(t));
  json j = {{"schema_version", kBenchmarkSchemaVersion},
            {"interaction_id", r.interaction.interaction_id},
            {"user_id", r.interaction.user_id},
            {"item_id", r.interaction.item_id},
            {"rating", r.interaction.rating},
            {"review_text", r.interaction.review_text},
            {"triplets", std::move(triplets)},
            {"ground_truth_explanation", r.ground_truth_explanation},
            {"extraction_meta",
             {{"backend_model_id", r.extraction_meta.backend_model_id},
              {"prompt_template_id", r.extraction_meta.prompt_template_id},
              {"extracted_at", r.extraction_meta.extracted_at}}}};
  if (r.interaction.timestamp) j["timestamp"] = *r.interaction.timestamp;
  for (const auto& [k, v] : r.extra_fields) {
    if (!known_record_fields().contains(k)) j[k] = json::parse(v);
  }
  return j.dump();
}

BenchmarkRecord parse_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kInput, std::string("benchmark line is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kInput, "benchmark line is not an object");
  auto version = j.find("schema_version");
  if (version == j.end() || !version->is_number_integer() || version->get<int>() != kBenchmarkSchemaVersion) {
    throw Error(ErrorKind::kIncompatibleBenchmark,
                "schema_version " + (version == j.end() ? std::string("missing") : version->dump()) +
                    ", expected " + std::to_string(kBenchmarkSchemaVersion));
  }
  BenchmarkRecord r;
  try {
    r.interaction.interaction_id = j.at("interaction_id").get<std::string>();
    r.interaction.user_id = j.at("user_id").get<std::string>();
    r.interaction.item_id = j.at("item_id").get<std::string>();
    r.interaction.rating = j.at("rating").get<double>();
    r.interaction.review_text = j.at("review_text").get<std::string>();
    if (auto ts = j.find("timestamp"); ts != j.end() && !ts->is_null()) {
      r.interaction.timestamp = ts->get<std::int64_t>();
    }
    for (const auto& t : j.at("triplets")) r.triplets.push_back(triplet_from_json(t));
    r.ground_truth_explanation = j.at("ground_truth_explanation").get<std::string>();
    const auto& meta = j.at("extraction_meta");
    r.extraction_meta.backend_model_id = meta.value("backend_model_id", std::string());
    r.extraction_meta.prompt_template_id = meta.value("prompt_template_id", std::string());
    r.extraction_meta.extracted_at = meta.value("extracted_at", std::int64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInput, std::string("malformed benchmark record: ") + e.what());
  }
  for (const auto& [k, v] : j.items()) {
    if (!known_record_fields().contains(k)) r.extra_fields[k] = v.dump();
  }
  return r;
}

void write_benchmark(const std::string& path, std::span<const BenchmarkRecord> records) {
  std::ofstream out = open_output(path);
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) throw Error(ErrorKind::kInput, "write failed for " + path);
}

std::vector<BenchmarkRecord> read_benchmark(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<BenchmarkRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const Error& e) {
      throw Error(e.kind(), where(path, lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generated explanations, metrics, external scores

std::string file_stem(const std::string& path) {
  std::string stem = std::filesystem::path(path).filename().string();
  for (const char* ext : {".jsonl", ".json", ".ndjson", ".txt"}) {
    if (stem.ends_with(ext) && stem.size() > std::string_view(ext).size()) {
      stem.resize(stem.size() - std::string_view(ext).size());
      break;
    }
  }
  return stem;
}

std::vector<GeneratedExplanation> read_generated(const std::string& path, const std::string& model_name) {
  std::ifstream in = open_input(path);
  const std::string model = model_name.empty() ? file_stem(path) : model_name;
  std::vector<GeneratedExplanation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      GeneratedExplanation g;
      g.interaction_id = j.at("interaction_id").get<std::string>();
      g.model_name = model;
      g.text = j.at("text").is_null() ? std::string() : j.at("text").get<std::string>();
      out.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInput, where(path, lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string serialize_metric(const MetricRecord& r) {
  json j = {{"interaction_id", r.interaction_id},
            {"model_name", r.model_name},
            {"dataset", r.dataset},
            {"metric_name", r.metric_name},
            {"value", r.value ? json(*r.value) : json(nullptr)},
            {"degenerate", r.degenerate}};
  return j.dump();
}

void write_metrics(const std::string& path, std::span<const MetricRecord> records) {
  std::ofstream out = open_output(path);
  for (const auto& r : records) out << serialize_metric(r) << '\n';
  if (!out) throw Error(ErrorKind::kInput, "write failed for " + path);
}

std::vector<MetricRecord> read_metrics(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      MetricRecord r;
      r.interaction_id = j.at("interaction_id").get<std::string>();
      r.model_name = j.at("model_name").get<std::string>();
      r.dataset = j.value("dataset", std::string());
      r.metric_name = j.at("metric_name").get<std::string>();
      if (!j.at("value").is_null()) r.value = j.at("value").get<double>();
      r.degenerate = j.value("degenerate", false);
      if (!r.value && !r.degenerate) {
        throw Error(ErrorKind::kInput, where(path, lineno) + ": null value on a non-degenerate record");
      }
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInput, where(path, lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MetricRecord> read_external_scores(const std::string& path, const std::string& default_model,
                                               const std::string& default_dataset) {
  std::ifstream in = open_input(path);
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      MetricRecord r;
      r.interaction_id = j.at("interaction_id").get<std::string>();
      r.metric_name = j.at("metric_name").get<std::string>();
      r.value = j.at("value").get<double>();
      r.model_name = j.value("model_name", default_model);
      r.dataset = j.value("dataset", default_dataset);
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kInput, where(path, lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stfact
