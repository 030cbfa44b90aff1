// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "stfact/cli.hpp"
#include "stfact/datasets.hpp"

namespace stfact {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kFixtures = STFACT_FIXTURE_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("stfact_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(dir_ / name, std::ios::binary) << content;
    return path(name);
  }
  std::string stub_bench() {
    const auto r = run({"--config", kFixtures + "/run_stub.json", "--backend-stub", "extract", "--reviews",
                        kFixtures + "/reviews_3.jsonl", "-o", path("bench.jsonl")});
    EXPECT_EQ(r.code, 0) << r.err;
    return path("bench.jsonl");
  }

  fs::path dir_;
};

TEST_F(CliTest, ExtractWithStubBackend) {
  const auto bench = read_benchmark(stub_bench());
  ASSERT_EQ(bench.size(), 2u);  // the third review yields no parseable statements
  EXPECT_EQ(bench[0].ground_truth_explanation,
            "The user would appreciate this product because the design is really cute. However, they may dislike "
            "that the material feels cheap. They seem indifferent to it runs true to size.");
  EXPECT_EQ(bench[0].extraction_meta.backend_model_id, "stub-chat");
  EXPECT_EQ(bench[0].extraction_meta.extracted_at, 0);
}

TEST_F(CliTest, StatsDelegatesToComputeStats) {
  const std::string bench = stub_bench();
  const auto r = run({"stats", "-i", bench});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out), json::parse(stats_to_json(compute_stats(read_benchmark(bench)))));
}

TEST_F(CliTest, SplitThenStatsWithSplits) {
  const auto r = run({"--seed", "3", "split", "-i", kFixtures + "/bench_toys_50.jsonl", "--out-dir", path("splits")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = run({"stats", "-i", kFixtures + "/bench_toys_50.jsonl", "--split-dir", path("splits")});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto j = json::parse(s.out);
  EXPECT_EQ(j["train"].get<int>() + j["valid"].get<int>() + j["test"].get<int>(), 50);
  EXPECT_EQ(j["valid"], 5);   // round(50 * 0.09)
  EXPECT_EQ(j["test"], 8);    // round(50 * 0.165)
}

TEST_F(CliTest, TopicsUnderStub) {
  const auto r = run({"--config", kFixtures + "/run_stub.json", "--backend-stub", "topics", "--reviews",
                      kFixtures + "/reviews_3.jsonl", "--domain-name", "clothes", "-k", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["topics"].size(), 10u);
  EXPECT_EQ(j["topics"][0], "material");
}

TEST_F(CliTest, EvaluateSelfAndEmptyAndTwoModels) {
  const std::string bench = stub_bench();
  const auto records = read_benchmark(bench);
  std::string echo, empty;
  for (const auto& r : records) {
    echo += json{{"interaction_id", r.interaction.interaction_id}, {"text", r.ground_truth_explanation}}.dump() + "\n";
    empty += json{{"interaction_id", r.interaction.interaction_id}, {"text", ""}}.dump() + "\n";
  }
  const auto e = run({"--config", kFixtures + "/run_stub.json", "--backend-stub", "evaluate", "-b", bench, "-g",
                      write("echo.jsonl", echo), "-g", write("blank.jsonl", empty), "-o", path("metrics.jsonl")});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto ms = read_metrics(path("metrics.jsonl"));
  std::map<std::string, std::size_t> per_model;
  for (const auto& m : ms) {
    ++per_model[m.model_name];
    EXPECT_EQ(m.dataset, "bench");
    if (m.model_name == "echo") {
      ASSERT_TRUE(m.value) << m.metric_name;
      if (m.metric_name.rfind("St2Exp", 0) == 0 || m.metric_name == "BLEU-4") EXPECT_EQ(*m.value, 1.0);
      if (m.metric_name == "StEnt-P" || m.metric_name == "StEnt-R") EXPECT_NEAR(*m.value, 0.98, 1e-9);
    } else {
      if (m.metric_name == "St2Exp-P") {
        EXPECT_EQ(m.value, 0.0);
        EXPECT_TRUE(m.degenerate);
      }
      if (m.metric_name == "StEnt-P") {
        EXPECT_FALSE(m.value);
        EXPECT_TRUE(m.degenerate);
      }
      if (m.metric_name == "BLEU-4") EXPECT_FALSE(m.degenerate);
    }
  }
  ASSERT_EQ(per_model.size(), 2u);
  EXPECT_EQ(per_model["echo"], per_model["blank"]);
  EXPECT_EQ(per_model["echo"] % records.size(), 0u);

  const auto rep = run({"report", "-m", path("metrics.jsonl"), "--out-dir", path("report")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_TRUE(fs::exists(path("report/report.csv")));
  EXPECT_TRUE(fs::exists(path("report/report.jsonl")));
  EXPECT_NE(slurp(path("report/report.md")).find("## bench"), std::string::npos);
}

TEST_F(CliTest, EvaluateIdJoinFailure) {
  const std::string bench = stub_bench();
  const std::string gen = write("ghost.jsonl", "{\"interaction_id\":\"nope\",\"text\":\"x\"}\n");
  const auto r = run({"--backend-stub", "evaluate", "-b", bench, "-g", gen, "-o", path("m.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("stfact:"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"stats", "-i", path("missing.jsonl")}).code, 2);
  EXPECT_EQ(run({"--config", path("missing.json"), "stats", "-i", kFixtures + "/bench_toys_50.jsonl"}).code, 1);
  EXPECT_EQ(run({"--config", write("bad.json", "{not json"), "stats", "-i", kFixtures + "/bench_toys_50.jsonl"}).code,
            1);
  EXPECT_EQ(run({"evaluate"}).code, 1);
  EXPECT_EQ(run({"--parallelism", "0", "stats", "-i", kFixtures + "/bench_toys_50.jsonl"}).code, 1);
  EXPECT_EQ(run({"stats", "-i", write("future.jsonl", "{\"schema_version\":99}\n")}).code, 2);

  const json cfg = {
      {"domain_config", kFixtures + "/domain_clothes.json"},
      {"backends",
       {{"extractor",
         {{"base_url", "http://127.0.0.1:1"}, {"model_id", "m"}, {"max_retries", 0}, {"timeout_seconds", 1.0},
          {"retry_backoff_ms", 0}, {"cache_path", path("empty_cache.jsonl")}}}}}};
  const auto r = run({"--config", write("unreachable.json", cfg.dump()), "extract", "--reviews",
                      kFixtures + "/reviews_3.jsonl", "-o", path("b.jsonl")});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const std::string bench = stub_bench();
  const std::string first = slurp(bench);
  stub_bench();
  EXPECT_EQ(slurp(bench), first);
}

}  // namespace
}  // namespace stfact
