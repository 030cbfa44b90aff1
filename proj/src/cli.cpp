// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <unordered_map>

#include "stfact/backends.hpp"
#include "stfact/composer.hpp"
#include "stfact/config.hpp"
#include "stfact/datasets.hpp"
#include "stfact/error.hpp"
#include "stfact/extractor.hpp"
#include "stfact/metrics.hpp"
#include "stfact/ngram.hpp"
#include "stfact/parallel.hpp"
#include "stfact/report.hpp"
#include "stfact/text.hpp"

namespace stfact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  int parallelism = 0;  // 0: from config
  bool backend_stub = false;
  std::optional<std::uint64_t> seed;
};

struct Context {
  RunConfig cfg;
  bool stub = false;
  int parallelism = 1;
  std::ostream& out;
  std::ostream& err;
};

void write_text_file(const std::string& path, const std::string& content) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kInput, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorKind::kInput, "write failed for " + path);
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw Error(ErrorKind::kInput, std::string(what) + " not found: " + path);
}

// ---------------------------------------------------------------------------
// Backend construction

std::shared_ptr<StubChat> make_stub_chat(const Context& ctx) {
  std::vector<StubChat::Rule> rules;
  if (!ctx.cfg.stub_chat_fixtures.empty()) rules = StubChat::load_rules(ctx.cfg.stub_chat_fixtures);
  return std::make_shared<StubChat>(std::move(rules), ctx.cfg.stub_default_reply);
}

const BackendConfig& require_backend(const std::optional<BackendConfig>& b, const char* role) {
  if (!b) throw Error(ErrorKind::kConfig, std::string("backends.") + role + " is not configured");
  validate(*b);
  return *b;
}

std::shared_ptr<ChatBackend> make_chat(const Context& ctx, const std::optional<BackendConfig>& b, const char* role) {
  if (ctx.stub) return make_stub_chat(ctx);
  const BackendConfig& bc = require_backend(b, role);
  return std::make_shared<HttpChatClient>(bc, make_http_transport(), ResponseCache::open(bc.cache_path));
}

std::shared_ptr<Judge> make_judge(const Context& ctx) {
  if (ctx.stub) return std::make_shared<StubJudge>();
  const BackendConfig& bc = require_backend(ctx.cfg.judge, "judge");
  JudgePrompt prompt = ctx.cfg.judge_prompt.empty() ? JudgePrompt::defaults() : load_judge_prompt(ctx.cfg.judge_prompt);
  auto cache = ResponseCache::open(bc.cache_path);
  auto chat = std::make_shared<HttpChatClient>(bc, make_http_transport(), cache);
  return std::make_shared<LlmJudge>(std::move(chat), std::move(prompt), ctx.cfg.judge_scale, cache);
}

std::shared_ptr<NliBackend> make_nli(const Context& ctx) {
  if (ctx.stub) return std::make_shared<StubNli>();
  const BackendConfig& bc = require_backend(ctx.cfg.nli, "nli");
  return std::make_shared<HttpNliClient>(bc, make_http_transport(), ResponseCache::open(bc.cache_path));
}

std::string judge_prompt_id(const Context& ctx) {
  if (ctx.stub) return {};
  return ctx.cfg.judge_prompt.empty() ? JudgePrompt::defaults().id : load_judge_prompt(ctx.cfg.judge_prompt).id;
}

DomainConfig require_domain(const Context& ctx, const std::string& override_path) {
  const std::string path = override_path.empty() ? ctx.cfg.domain_config : override_path;
  if (path.empty()) throw Error(ErrorKind::kConfig, "no domain config (set domain_config or pass --domain)");
  return load_domain_config(path);
}

std::int64_t extraction_timestamp(bool stub) {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return stub ? 0 : static_cast<std::int64_t>(std::time(nullptr));
}

// ---------------------------------------------------------------------------
// topics

struct TopicsArgs {
  std::string reviews;
  std::string domain;
  std::string domain_name;
  int k = 10;
  int sample = 20;
  std::string output;
};

int cmd_topics(const Context& ctx, const TopicsArgs& a) {
  require_file(a.reviews, "reviews file");
  std::string name = a.domain_name;
  if (name.empty()) {
    if (a.domain.empty() && ctx.cfg.domain_config.empty()) {
      throw Error(ErrorKind::kConfig, "topics needs --domain-name or a domain config");
    }
    name = require_domain(ctx, a.domain).domain_name;
  }
  std::vector<std::string> samples;
  IngestStats stats = ingest_reviews(a.reviews, [&](Interaction&& it) {
    if (static_cast<int>(samples.size()) < a.sample) samples.push_back(std::move(it.review_text));
  });
  ctx.err << "topics: sampled " << samples.size() << " of " << stats.interactions << " reviews\n";
  auto chat = make_chat(ctx, ctx.cfg.extractor, "extractor");
  const auto topics = elicit_topics(name, samples, a.k, *chat);
  const std::string doc = json{{"domain_name", name}, {"topics", topics}}.dump(2) + "\n";
  if (a.output.empty()) {
    ctx.out << doc;
  } else {
    write_text_file(a.output, doc);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string reviews;
  std::string domain;
  std::string output;
};

int cmd_extract(const Context& ctx, const ExtractArgs& a) {
  require_file(a.reviews, "reviews file");
  const DomainConfig domain = require_domain(ctx, a.domain);
  auto chat = make_chat(ctx, ctx.cfg.extractor, "extractor");

  IngestStats istats;
  const std::vector<Interaction> interactions = ingest_reviews(a.reviews, &istats);
  ctx.err << "extract: " << istats.interactions << " interactions (" << istats.malformed << " malformed, "
          << istats.duplicates << " duplicate lines skipped)\n";

  const ExtractionMeta meta{chat->model_id(), domain.prompt_template_id, extraction_timestamp(ctx.stub)};
  std::vector<std::optional<ExtractionResult>> results(interactions.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  parallel_for(interactions.size(), ctx.parallelism, [&](std::size_t i) {
    results[i] = extract_triplets(interactions[i].review_text, domain, *chat);
    const std::size_t d = ++done;
    if (d % 100 == 0) {
      std::lock_guard lock(progress_mu);
      ctx.err << "extract: " << d << "/" << interactions.size() << "\n";
    }
  });

  std::vector<BenchmarkRecord> records;
  std::size_t failed = 0;
  std::size_t empty = 0;
  std::size_t dropped = 0;
  std::size_t coerced = 0;
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    ExtractionResult& r = *results[i];
    dropped += r.dropped.size();
    if (r.failed) {
      ++failed;
      continue;
    }
    if (r.triplets.empty()) {
      ++empty;
      continue;
    }
    for (const auto& t : r.triplets) coerced += t.flags.count(std::string(flags::kTopicCoerced));
    BenchmarkRecord rec;
    rec.interaction = interactions[i];
    rec.ground_truth_explanation = compose_explanation(r.triplets, ctx.cfg.composer);
    rec.triplets = std::move(r.triplets);
    rec.extraction_meta = meta;
    records.push_back(std::move(rec));
  }
  write_benchmark(a.output, records);
  ctx.err << "extract: wrote " << records.size() << " records; excluded " << failed << " failed and " << empty
          << " empty extractions; dropped " << dropped << " items; " << coerced << " topics coerced\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compose

int cmd_compose(const Context& ctx, const std::string& input, const std::string& output) {
  require_file(input, "benchmark");
  std::vector<BenchmarkRecord> records = read_benchmark(input);
  std::size_t skipped = 0;
  std::vector<BenchmarkRecord> kept;
  for (auto& r : records) {
    if (r.triplets.empty()) {
      ++skipped;
      continue;
    }
    r.ground_truth_explanation = compose_explanation(r.triplets, ctx.cfg.composer);
    kept.push_back(std::move(r));
  }
  write_benchmark(output, kept);
  ctx.err << "compose: wrote " << kept.size() << " records; excluded " << skipped << " without triplets\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split

int cmd_split(const Context& ctx, const std::string& input, const std::string& out_dir) {
  require_file(input, "benchmark");
  std::vector<BenchmarkRecord> records = read_benchmark(input);
  const std::size_t before = records.size();
  std::erase_if(records, [](const BenchmarkRecord& r) { return r.triplets.empty(); });
  const CorpusSplit split = split_corpus(std::move(records), ctx.cfg.split);
  const fs::path dir(out_dir);
  write_benchmark((dir / "train.jsonl").string(), split.train);
  write_benchmark((dir / "valid.jsonl").string(), split.valid);
  write_benchmark((dir / "test.jsonl").string(), split.test);
  ctx.err << "split: train " << split.train.size() << ", valid " << split.valid.size() << ", test "
          << split.test.size() << "; excluded " << before - split.train.size() - split.valid.size() - split.test.size()
          << " without triplets\n";
  return 0;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const Context& ctx, const std::string& input, const std::string& split_dir, const std::string& output) {
  require_file(input, "benchmark");
  const std::vector<BenchmarkRecord> records = read_benchmark(input);
  std::optional<SplitCounts> splits;
  if (!split_dir.empty()) {
    const fs::path dir(split_dir);
    SplitCounts c;
    for (auto [name, slot] : {std::pair{"train.jsonl", &c.train}, {"valid.jsonl", &c.valid}, {"test.jsonl", &c.test}}) {
      const std::string p = (dir / name).string();
      require_file(p, "split file");
      *slot = read_benchmark(p).size();
    }
    splits = c;
  }
  const std::string doc = stats_to_json(compute_stats(records, splits)) + "\n";
  if (output.empty()) {
    ctx.out << doc;
  } else {
    write_text_file(output, doc);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string benchmark;
  std::vector<std::string> generated;
  std::vector<std::string> models;
  std::string dataset;
  std::string domain;
  std::string output;
  std::optional<double> max_missing;
};

DomainConfig fallback_domain() {
  DomainConfig d;
  d.domain_name = "generic";
  d.topics = {"general"};
  return make_domain_config(std::move(d));
}

struct EvalTask {
  std::size_t model_index;
  const GeneratedExplanation* gen;
  const BenchmarkRecord* record;
};

struct EvalOutcome {
  std::vector<MetricRecord> records;
  bool degenerate = false;
  bool extracted = false;  // LLM extraction fallback was used
};

int cmd_evaluate(const Context& ctx, const EvaluateArgs& a) {
  require_file(a.benchmark, "benchmark");
  for (const auto& g : a.generated) require_file(g, "generated explanations");
  if (!a.models.empty() && a.models.size() != a.generated.size()) {
    throw Error(ErrorKind::kConfig, "--model must be given once per --generated file");
  }
  const double threshold = a.max_missing.value_or(ctx.cfg.id_join_threshold);
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::kConfig, "--max-missing must lie in [0,1]");
  const std::string dataset = a.dataset.empty() ? file_stem(a.benchmark) : a.dataset;

  const std::vector<BenchmarkRecord> bench = read_benchmark(a.benchmark);
  std::unordered_map<std::string, const BenchmarkRecord*> by_id;
  for (const auto& r : bench) by_id.emplace(r.interaction.interaction_id, &r);

  std::vector<std::string> model_names;
  std::vector<std::vector<GeneratedExplanation>> gens;
  std::vector<EvalTask> tasks;
  std::size_t no_reference = 0;
  for (std::size_t f = 0; f < a.generated.size(); ++f) {
    gens.push_back(read_generated(a.generated[f], a.models.empty() ? std::string() : a.models[f]));
  }
  for (std::size_t f = 0; f < gens.size(); ++f) {
    const std::string model = a.models.empty() ? file_stem(a.generated[f]) : a.models[f];
    if (std::find(model_names.begin(), model_names.end(), model) != model_names.end()) {
      throw Error(ErrorKind::kConfig, "duplicate model name: " + model);
    }
    model_names.push_back(model);
    std::size_t missing = 0;
    std::size_t duplicates = 0;
    std::unordered_map<std::string, bool> seen;
    for (const auto& g : gens[f]) {
      auto it = by_id.find(g.interaction_id);
      if (it == by_id.end()) {
        ++missing;
        continue;
      }
      if (!seen.emplace(g.interaction_id, true).second) {
        ++duplicates;
        continue;
      }
      if (it->second->triplets.empty()) {
        ++no_reference;
        continue;
      }
      tasks.push_back({f, &g, it->second});
    }
    const std::size_t total = gens[f].size();
    if (missing > 0 || duplicates > 0) {
      ctx.err << "evaluate: " << model << ": " << missing << " of " << total << " ids missing from benchmark, "
              << duplicates << " duplicates skipped\n";
    }
    if (total > 0 && static_cast<double>(missing) > threshold * static_cast<double>(total)) {
      throw Error(ErrorKind::kIdJoinFailure, model + ": " + std::to_string(missing) + " of " + std::to_string(total) +
                                                 " generated ids are not in the benchmark");
    }
  }
  if (no_reference > 0) ctx.err << "evaluate: skipped " << no_reference << " benchmark records without triplets\n";

  std::sort(tasks.begin(), tasks.end(), [](const EvalTask& x, const EvalTask& y) {
    if (x.model_index != y.model_index) return x.model_index < y.model_index;
    return x.record->interaction.interaction_id < y.record->interaction.interaction_id;
  });

  auto judge = make_judge(ctx);
  auto nli = make_nli(ctx);
  const std::string prompt_id = judge_prompt_id(ctx);
  const DomainConfig domain =
      (!a.domain.empty() || !ctx.cfg.domain_config.empty()) ? require_domain(ctx, a.domain) : fallback_domain();
  std::once_flag chat_once;
  std::shared_ptr<ChatBackend> chat;
  auto extractor = [&]() -> ChatBackend& {
    std::call_once(chat_once, [&] { chat = make_chat(ctx, ctx.cfg.extractor, "extractor"); });
    return *chat;
  };

  std::vector<EvalOutcome> outcomes(tasks.size());
  parallel_for(tasks.size(), ctx.parallelism, [&](std::size_t i) {
    const EvalTask& t = tasks[i];
    const std::string& gen_text = t.gen->text;
    const std::string& ref_text = t.record->ground_truth_explanation;
    EvalOutcome& o = outcomes[i];

    std::vector<std::string> gen_statements;
    if (!text::trim(gen_text).empty()) {
      if (auto groups = parse_composed(gen_text, ctx.cfg.composer)) {
        gen_statements = groups->statements();
      } else {
        o.extracted = true;
        for (auto& tr : extract_triplets(gen_text, domain, extractor()).triplets) {
          gen_statements.push_back(std::move(tr.statement));
        }
      }
    }
    std::vector<std::string> ref_statements;
    for (const auto& tr : t.record->triplets) ref_statements.push_back(lowercase_first(tr.statement));

    const St2ExpScores s2e = st2exp(gen_statements, ref_statements, gen_text, ref_text, *judge, prompt_id);
    const NliScores nl = stent_stcoh(nli_alignment(gen_statements, ref_statements, *nli));
    const NgramScores ng = ngram_baselines(gen_text, ref_text);
    const bool deg = gen_statements.empty();
    o.degenerate = deg;

    auto add = [&](const char* name, std::optional<double> v, bool degenerate) {
      o.records.push_back({t.record->interaction.interaction_id, model_names[t.model_index], dataset, name, v,
                           degenerate});
    };
    add("St2Exp-P", s2e.precision, deg);
    add("St2Exp-R", s2e.recall, deg);
    add("St2Exp-F1", s2e.f1, deg);
    add("StEnt-P", nl.stent_p, deg);
    add("StEnt-R", nl.stent_r, deg);
    add("StEnt-F1", nl.stent_f1, deg);
    add("StCoh-P", nl.stcoh_p, deg);
    add("StCoh-R", nl.stcoh_r, deg);
    if (ctx.cfg.include_stcoh_f1) add("StCoh-F1", nl.stcoh_f1, !nl.stcoh_f1.has_value());
    add("BLEU-4", ng.bleu4, false);
    add("ROUGE-1", ng.rouge1_f1, false);
    add("ROUGE-2", ng.rouge2_f1, false);
    add("ROUGE-L", ng.rougeL_f1, false);
  });

  std::vector<MetricRecord> all;
  std::size_t degenerate = 0;
  std::size_t extracted = 0;
  for (auto& o : outcomes) {
    degenerate += o.degenerate;
    extracted += o.extracted;
    for (auto& r : o.records) all.push_back(std::move(r));
  }
  write_metrics(a.output, all);
  ctx.err << "evaluate: " << tasks.size() << " interactions, " << degenerate << " degenerate, " << extracted
          << " via extraction fallback\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> metrics;
  std::vector<std::string> external;
  std::vector<std::string> external_models;
  std::string external_dataset;
  std::vector<std::string> formats;
  std::vector<std::string> correlate;
  std::string granularity = "model-dataset";
  std::string out_dir;
};

int cmd_report(const Context& ctx, const ReportArgs& a) {
  if (a.metrics.empty()) throw Error(ErrorKind::kConfig, "report needs at least one --metrics file");
  if (!a.external_models.empty() && a.external_models.size() != a.external.size()) {
    throw Error(ErrorKind::kConfig, "--external-model must be given once per --external file");
  }
  ReportOptions opts;
  opts.include_stcoh_f1 = ctx.cfg.include_stcoh_f1;
  auto g = parse_granularity(a.granularity);
  if (!g) throw Error(ErrorKind::kConfig, "--granularity must be model-dataset or interaction");
  opts.granularity = *g;
  for (const auto& c : a.correlate) {
    auto req = parse_correlation_request(c);
    if (!req) throw Error(ErrorKind::kConfig, "--correlate expects METRIC_X:METRIC_Y, got " + c);
    opts.correlations.push_back(*req);
  }
  const std::vector<std::string>& formats = a.formats.empty() ? ctx.cfg.report_formats : a.formats;
  for (const auto& f : formats) {
    if (f != "csv" && f != "json" && f != "markdown") throw Error(ErrorKind::kConfig, "unknown report format: " + f);
  }

  std::vector<MetricRecord> records;
  for (const auto& p : a.metrics) {
    require_file(p, "metrics file");
    auto rs = read_metrics(p);
    records.insert(records.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }
  std::string default_dataset = a.external_dataset;
  if (default_dataset.empty()) {
    std::vector<std::string> ds;
    for (const auto& r : records) {
      if (std::find(ds.begin(), ds.end(), r.dataset) == ds.end()) ds.push_back(r.dataset);
    }
    if (ds.size() == 1) default_dataset = ds.front();
  }
  for (std::size_t i = 0; i < a.external.size(); ++i) {
    require_file(a.external[i], "external scores file");
    const std::string model = a.external_models.empty() ? file_stem(a.external[i]) : a.external_models[i];
    auto rs = read_external_scores(a.external[i], model, default_dataset);
    for (const auto& r : rs) {
      if (r.dataset.empty()) {
        throw Error(ErrorKind::kInput, a.external[i] + ": dataset is ambiguous; pass --external-dataset");
      }
    }
    records.insert(records.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }

  const AggregateReport rep = aggregate(records, opts);
  const fs::path dir(a.out_dir);
  for (const auto& f : formats) {
    if (f == "csv") write_text_file((dir / "report.csv").string(), render_csv(rep));
    if (f == "json") write_text_file((dir / "report.jsonl").string(), render_jsonl(rep));
    if (f == "markdown") write_text_file((dir / "report.md").string(), render_markdown(rep));
  }
  if (!rep.correlations.empty()) {
    write_text_file((dir / "correlations.csv").string(), render_correlations_csv(rep));
    write_text_file((dir / "correlation_points.csv").string(), render_correlation_points_csv(rep));
    for (const auto& c : rep.correlations) {
      if (!c.r) ctx.err << "report: correlation " << c.metric_x << " vs " << c.metric_y << " is n/a\n";
    }
  }
  ctx.err << "report: " << rep.cells.size() << " cells over " << rep.models.size() << " models and "
          << rep.datasets.size() << " datasets\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statement-level factuality benchmarks for review explanations", "stfact"};
  app.require_subcommand(1);
  Globals gl;
  app.add_option("--config", gl.config, "Run configuration (JSON)");
  app.add_option("--parallelism", gl.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--backend-stub", gl.backend_stub, "Use the deterministic stub backends");
  app.add_option("--seed", gl.seed, "Split seed");

  TopicsArgs ta;
  auto* topics = app.add_subcommand("topics", "Elicit a topic shortlist for a domain");
  topics->add_option("--reviews", ta.reviews, "Reviews file (JSONL)")->required();
  topics->add_option("--domain", ta.domain, "Domain config");
  topics->add_option("--domain-name", ta.domain_name, "Domain name");
  topics->add_option("-k,--k", ta.k, "Number of topics")->check(CLI::PositiveNumber);
  topics->add_option("--sample", ta.sample, "Reviews shown to the model")->check(CLI::PositiveNumber);
  topics->add_option("-o,--output", ta.output, "Output path (stdout when omitted)");

  ExtractArgs ea;
  auto* extract = app.add_subcommand("extract", "Extract triplets and compose ground truths");
  extract->add_option("--reviews", ea.reviews, "Reviews file (JSONL)")->required();
  extract->add_option("--domain", ea.domain, "Domain config");
  extract->add_option("-o,--output", ea.output, "Benchmark output path")->required();

  std::string compose_in;
  std::string compose_out;
  auto* compose = app.add_subcommand("compose", "Recompose ground-truth explanations");
  compose->add_option("-i,--input", compose_in, "Benchmark file")->required();
  compose->add_option("-o,--output", compose_out, "Output path")->required();

  std::string split_in;
  std::string split_dir;
  auto* split = app.add_subcommand("split", "Split a benchmark into train/valid/test");
  split->add_option("-i,--input", split_in, "Benchmark file")->required();
  split->add_option("--out-dir", split_dir, "Output directory")->required();

  std::string stats_in;
  std::string stats_split_dir;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("-i,--input", stats_in, "Benchmark file")->required();
  stats->add_option("--split-dir", stats_split_dir, "Directory with train/valid/test.jsonl");
  stats->add_option("-o,--output", stats_out, "Output path (stdout when omitted)");

  EvaluateArgs va;
  double max_missing = -1.0;
  auto* evaluate = app.add_subcommand("evaluate", "Score generated explanations");
  evaluate->add_option("-b,--benchmark", va.benchmark, "Benchmark file")->required();
  evaluate->add_option("-g,--generated", va.generated, "Generated explanations, one file per model")->required();
  evaluate->add_option("--model", va.models, "Model name per --generated file");
  evaluate->add_option("--dataset", va.dataset, "Dataset name (default: benchmark file stem)");
  evaluate->add_option("--domain", va.domain, "Domain config for the extraction fallback");
  evaluate->add_option("--max-missing", max_missing, "Tolerated fraction of unknown ids");
  evaluate->add_option("-o,--output", va.output, "Metric records output")->required();

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Aggregate metric records");
  report->add_option("-m,--metrics", ra.metrics, "Metric record files")->required();
  report->add_option("--external", ra.external, "External score files");
  report->add_option("--external-model", ra.external_models, "Model name per --external file");
  report->add_option("--external-dataset", ra.external_dataset, "Dataset for external scores");
  report->add_option("--format", ra.formats, "csv, json, markdown")->delimiter(',');
  report->add_option("--correlate", ra.correlate, "Metric pair X:Y");
  report->add_option("--granularity", ra.granularity, "model-dataset or interaction");
  report->add_option("--out-dir", ra.out_dir, "Output directory")->required();

  for (auto* sub : {topics, extract, compose, split, stats, evaluate, report}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code_for(ErrorKind::kConfig);
  }

  try {
    RunConfig cfg = load_run_config(gl.config);
    if (gl.parallelism > 0) cfg.parallelism = gl.parallelism;
    if (gl.seed) cfg.split.seed = *gl.seed;
    validate(cfg);
    Context ctx{std::move(cfg), gl.backend_stub, 1, out, err};
    ctx.parallelism = ctx.cfg.parallelism;
    if (max_missing >= 0.0) va.max_missing = max_missing;

    if (*topics) return cmd_topics(ctx, ta);
    if (*extract) return cmd_extract(ctx, ea);
    if (*compose) return cmd_compose(ctx, compose_in, compose_out);
    if (*split) return cmd_split(ctx, split_in, split_dir);
    if (*stats) return cmd_stats(ctx, stats_in, stats_split_dir, stats_out);
    if (*evaluate) return cmd_evaluate(ctx, va);
    if (*report) return cmd_report(ctx, ra);
    throw Error(ErrorKind::kInvariant, "no subcommand dispatched");
  } catch (const Error& e) {
    err << "stfact: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "stfact: internal error: " << e.what() << "\n";
    return exit_code_for(ErrorKind::kInvariant);
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace stfact
