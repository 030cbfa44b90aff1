// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>

#include "stfact/composer.hpp"
#include "stfact/datasets.hpp"
#include "stfact/error.hpp"

namespace stfact {
namespace {

namespace fs = std::filesystem;

std::string temp_file(const std::string& name, const std::string& content) {
  const fs::path dir = fs::path(::testing::TempDir()) / "stfact_datasets_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

BenchmarkRecord record(int i, std::vector<StatementTriplet> triplets = {}) {
  BenchmarkRecord r;
  r.interaction = make_interaction("u" + std::to_string(i % 7), "i" + std::to_string(i % 5), 1.0 + i % 5,
                                   "review " + std::to_string(i), 1400000000 + i);
  if (triplets.empty()) triplets.push_back({"statement " + std::to_string(i), "other", Sentiment::kPositive, {}, {}});
  r.triplets = std::move(triplets);
  r.ground_truth_explanation = compose_explanation(r.triplets);
  r.extraction_meta = {"stub-chat", "extract-v1", 0};
  return r;
}

std::vector<std::string> ids(const std::vector<BenchmarkRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.interaction.interaction_id);
  return out;
}

std::vector<BenchmarkRecord> fixture_records() { return read_benchmark(STFACT_FIXTURE_DIR "/bench_toys_50.jsonl"); }

// Ingestion ------------------------------------------------------------------

TEST(Ingest, ThreeReviewFixture) {
  IngestStats st;
  const auto xs = ingest_reviews(STFACT_FIXTURE_DIR "/reviews_3.jsonl", &st);
  ASSERT_EQ(xs.size(), 3u);
  EXPECT_EQ(st.malformed, 0u);
  EXPECT_EQ(xs[0].user_id, "A2SUAM1J3GNN3B");
  EXPECT_EQ(xs[0].item_id, "B000SWTR01");
  EXPECT_EQ(xs[0].rating, 4.0);
  EXPECT_EQ(xs[0].timestamp, 1393545600);
  EXPECT_EQ(xs[0].interaction_id, make_interaction_id(xs[0].user_id, xs[0].item_id, xs[0].timestamp, xs[0].review_text));
  EXPECT_EQ(xs[1].item_id, "B000LEGG02");
}

TEST(Ingest, SkipsMalformedLinesWithCount) {
  std::string content;
  for (int i = 0; i < 10; ++i) {
    content += R"({"reviewerID":"u)" + std::to_string(i) + R"(","asin":"a","overall":5,"reviewText":"ok )" +
               std::to_string(i) + "\"}\n";
  }
  content += R"({"reviewerID":"u","asin":"a","overall":5})" "\n\n";
  IngestStats st;
  const auto xs = ingest_reviews(temp_file("missing.jsonl", content), &st);
  EXPECT_EQ(xs.size(), 10u);
  EXPECT_EQ(st.malformed, 1u);
  EXPECT_EQ(st.lines, 11u);
  EXPECT_FALSE(xs[0].timestamp);
}

TEST(Ingest, EmptyFile) {
  IngestStats st;
  EXPECT_TRUE(ingest_reviews(temp_file("empty.jsonl", ""), &st).empty());
  EXPECT_EQ(st.malformed, 0u);
  EXPECT_EQ(st.lines, 0u);
}

TEST(Ingest, DuplicatesAreDropped) {
  const std::string line = R"({"reviewerID":"u","asin":"a","overall":5,"unixReviewTime":1,"reviewText":"same"})" "\n";
  IngestStats st;
  EXPECT_EQ(ingest_reviews(temp_file("dup.jsonl", line + line), &st).size(), 1u);
  EXPECT_EQ(st.duplicates, 1u);
}

TEST(Ingest, CorruptAndUnreadable) {
  std::string content = "not json\n{\"reviewerID\":3}\n";
  for (int i = 0; i < 8; ++i) {
    content += R"({"reviewerID":"u","asin":"a","overall":5,"reviewText":"r)" + std::to_string(i) + "\"}\n";
  }
  try {
    ingest_reviews(temp_file("corrupt.jsonl", content));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorpusCorrupt);
  }
  try {
    ingest_reviews("/nonexistent/reviews.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

// Splits ---------------------------------------------------------------------

TEST(Split, RoundingRule) {
  std::vector<BenchmarkRecord> rs;
  for (int i = 0; i < 10; ++i) rs.push_back(record(i));
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const auto s = split_corpus(rs, {0.8, 0.1, 0.1, seed});
    EXPECT_EQ(s.train.size(), 8u);
    EXPECT_EQ(s.valid.size(), 1u);
    EXPECT_EQ(s.test.size(), 1u);
  }
}

TEST(Split, ToysScaleSizes) {
  std::vector<BenchmarkRecord> rs(163711);
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i].interaction.interaction_id = std::to_string(i);
  const auto s = split_corpus(std::move(rs), SplitSpec{});
  EXPECT_EQ(s.train.size(), 121965u);
  EXPECT_EQ(s.valid.size(), 14734u);
  EXPECT_EQ(s.test.size(), 27012u);
}

TEST(Split, DeterministicAndOrderIndependent) {
  std::vector<BenchmarkRecord> rs;
  for (int i = 0; i < 40; ++i) rs.push_back(record(i));
  const SplitSpec spec{0.7, 0.1, 0.2, 7};
  const auto a = split_corpus(rs, spec);
  std::mt19937 rng(1);
  std::shuffle(rs.begin(), rs.end(), rng);
  const auto b = split_corpus(rs, spec);
  EXPECT_EQ(ids(a.train), ids(b.train));
  EXPECT_EQ(ids(a.valid), ids(b.valid));
  EXPECT_EQ(ids(a.test), ids(b.test));
  EXPECT_NE(ids(split_corpus(rs, {0.7, 0.1, 0.2, 8}).test), ids(a.test));
}

TEST(Split, PartitionPropertyOverSeeds) {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<BenchmarkRecord> rs;
    for (std::size_t i = 0; i < n; ++i) rs.push_back(record(static_cast<int>(i)));
    const double v = 0.05 + 0.3 * static_cast<double>(rng() % 100) / 100.0;
    const double t = 0.05 + 0.3 * static_cast<double>(rng() % 100) / 100.0;
    const auto s = split_corpus(rs, {1.0 - v - t, v, t, seed});
    std::multiset<std::string> all;
    for (const auto* part : {&s.train, &s.valid, &s.test}) {
      for (const auto& r : *part) all.insert(r.interaction.interaction_id);
      EXPECT_TRUE(std::is_sorted(part->begin(), part->end(), [](const auto& x, const auto& y) {
        return x.interaction.interaction_id < y.interaction.interaction_id;
      }));
    }
    std::vector<std::string> input = ids(rs);
    EXPECT_EQ(all, std::multiset<std::string>(input.begin(), input.end()));
    EXPECT_EQ(s.train.size() + s.valid.size() + s.test.size(), n);
  }
}

TEST(Split, Preconditions) {
  EXPECT_THROW(split_corpus({}, SplitSpec{}), Error);
  EXPECT_THROW(validate(SplitSpec{0.5, 0.5, 0.0, 0}), Error);
  EXPECT_THROW(validate(SplitSpec{0.5, 0.3, 0.3, 0}), Error);
  EXPECT_NO_THROW(validate(SplitSpec{}));
}

TEST(SplitRng, BelowStaysInRange) {
  SplitRng rng(3);
  for (std::uint64_t b : {1ull, 2ull, 3ull, 1000ull}) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(rng.below(b), b);
  }
}

// Statistics -------------------------------------------------------------------

TEST(Stats, Arithmetic) {
  std::vector<BenchmarkRecord> rs;
  int i = 0;
  for (int count : {2, 3, 5, 10}) {
    std::vector<StatementTriplet> ts;
    for (int k = 0; k < count; ++k) ts.push_back({"s" + std::to_string(i++), "other", Sentiment::kNeutral, {}, {}});
    rs.push_back(record(i, ts));
  }
  EXPECT_DOUBLE_EQ(compute_stats(rs).avg_statements_per_interaction, 5.0);
}

TEST(Stats, UniqueUsesNormalization) {
  std::vector<BenchmarkRecord> rs{
      record(1, {{"Soft fabric.", "other", Sentiment::kPositive, {}, {}}, {"cheap", "other", Sentiment::kNegative, {}, {}}}),
      record(2, {{"soft  fabric", "other", Sentiment::kPositive, {}, {}}})};
  const auto s = compute_stats(rs);
  EXPECT_EQ(s.total_statements, 3u);
  EXPECT_EQ(s.unique_statements, 2u);
}

TEST(Stats, FixtureMatchesHandCount) {
  const auto s = compute_stats(fixture_records());
  EXPECT_EQ(s.interactions, 50u);
  EXPECT_EQ(s.users, 15u);
  EXPECT_EQ(s.items, 20u);
  EXPECT_EQ(s.total_statements, 161u);
  EXPECT_EQ(s.unique_statements, 24u);
  EXPECT_DOUBLE_EQ(s.avg_statements_per_interaction, 3.22);
  EXPECT_DOUBLE_EQ(s.avg_per_user, 161.0 / 15.0);
  EXPECT_DOUBLE_EQ(s.avg_per_item, 8.05);
}

TEST(Stats, PermutationInvariant) {
  auto rs = fixture_records();
  const std::string want = stats_to_json(compute_stats(rs));
  std::mt19937 rng(9);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(rs.begin(), rs.end(), rng);
    EXPECT_EQ(stats_to_json(compute_stats(rs)), want);
  }
}

TEST(Stats, JsonIncludesSplits) {
  const auto j = nlohmann::json::parse(stats_to_json(compute_stats(fixture_records(), SplitCounts{40, 4, 6})));
  EXPECT_EQ(j["train"], 40);
  EXPECT_EQ(j["test"], 6);
  EXPECT_EQ(j["interactions"], 50);
}

// Serialization -------------------------------------------------------------------

TEST(Benchmark, FixtureLinesRoundTripByteExact) {
  std::ifstream in(STFACT_FIXTURE_DIR "/bench_toys_50.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(serialize_record(parse_record(line)), line);
    ++n;
  }
  EXPECT_EQ(n, 50);
  const auto rs = fixture_records();
  EXPECT_EQ(rs[5].extra_fields.at("helpful"), "[2,3]");
  EXPECT_FALSE(rs[3].interaction.timestamp);
}

TEST(Benchmark, SweaterRecordRoundTrip) {
  BenchmarkRecord r;
  r.interaction = make_interaction("A2SUAM1J3GNN3B", "B000SWTR01", 4.0, "The design is really cute.", 1393545600);
  r.triplets = {{"the design is really cute", "design", Sentiment::kPositive, SourceSpan{0, 25}, {}},
                {"the material feels cheap", "other", Sentiment::kNegative, std::nullopt, {"topic_coerced"}}};
  r.ground_truth_explanation = compose_explanation(r.triplets);
  r.extraction_meta = {"m", "extract-v1", 5};
  const std::string path = temp_file("sweater.jsonl", "");
  write_benchmark(path, std::vector<BenchmarkRecord>{r});
  const auto back = read_benchmark(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> alphabet{"a", "b", " ", "\"", "\\", "\n", "\t", "\xc3\xa9", "{", "}", ".", ","};
  std::string s = "x";
  const std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
  return s;
}

TEST(Benchmark, RandomRecordsRoundTrip) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    BenchmarkRecord r;
    std::optional<std::int64_t> ts;
    if (rng() % 2) ts = static_cast<std::int64_t>(rng() % 2000000000);
    r.interaction = make_interaction(random_text(rng), random_text(rng), static_cast<double>(rng() % 11) / 2.0,
                                     random_text(rng), ts);
    const std::size_t k = 1 + rng() % 4;
    for (std::size_t j = 0; j < k; ++j) {
      StatementTriplet t{random_text(rng), "other", kSentiments[rng() % 3], std::nullopt, {}};
      if (rng() % 2) t.source_span = SourceSpan{rng() % 10, 10 + rng() % 10};
      if (rng() % 3 == 0) t.flags.insert("topic_coerced");
      r.triplets.push_back(std::move(t));
    }
    r.ground_truth_explanation = random_text(rng);
    r.extraction_meta = {random_text(rng), "p", static_cast<std::int64_t>(rng() % 100)};
    if (rng() % 2) r.extra_fields["zz_extra"] = "{\"a\":[1,2]}";
    const auto back = parse_record(serialize_record(r));
    EXPECT_EQ(back, r);
    EXPECT_EQ(serialize_record(back), serialize_record(r));
  }
}

TEST(Benchmark, SchemaGate) {
  auto j = nlohmann::json::parse(serialize_record(record(1)));
  j["schema_version"] = kBenchmarkSchemaVersion + 1;
  try {
    parse_record(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIncompatibleBenchmark);
  }
  j.erase("schema_version");
  EXPECT_THROW(parse_record(j.dump()), Error);
  try {
    parse_record("{\"schema_version\":1}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
}

TEST(Benchmark, EmptyFile) { EXPECT_TRUE(read_benchmark(temp_file("empty_bench.jsonl", "")).empty()); }

TEST(Files, GeneratedMetricsAndExternal) {
  const std::string gen = temp_file("model_a.jsonl", "{\"interaction_id\":\"x\",\"text\":\"hi\"}\n"
                                                     "{\"interaction_id\":\"y\",\"text\":null}\n");
  const auto g = read_generated(gen);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].model_name, "model_a");
  EXPECT_EQ(g[1].text, "");
  EXPECT_EQ(read_generated(gen, "other")[0].model_name, "other");

  const std::vector<MetricRecord> ms{{"x", "m", "toys", "St2Exp-P", 0.5, false},
                                     {"y", "m", "toys", "StEnt-P", std::nullopt, true}};
  const std::string mp = temp_file("metrics.jsonl", "");
  write_metrics(mp, ms);
  EXPECT_EQ(read_metrics(mp), ms);
  EXPECT_THROW(read_metrics(temp_file("bad_metrics.jsonl",
                                      "{\"interaction_id\":\"x\",\"model_name\":\"m\",\"dataset\":\"d\","
                                      "\"metric_name\":\"BLEU-4\",\"value\":null,\"degenerate\":false}\n")),
               Error);

  const auto ext = read_external_scores(
      temp_file("bertscore.jsonl", "{\"interaction_id\":\"x\",\"metric_name\":\"BERTScore\",\"value\":0.9}\n"
                                   "{\"interaction_id\":\"x\",\"metric_name\":\"BERTScore\",\"value\":0.8,"
                                   "\"model_name\":\"n\"}\n"),
      "m", "toys");
  ASSERT_EQ(ext.size(), 2u);
  EXPECT_EQ(ext[0].model_name, "m");
  EXPECT_EQ(ext[0].dataset, "toys");
  EXPECT_EQ(ext[1].model_name, "n");
  EXPECT_EQ(file_stem("/a/b/toys_test.jsonl"), "toys_test");
}

}  // namespace
}  // namespace stfact
