// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "stfact/error.hpp"
#include "stfact/metrics.hpp"

namespace stfact {

using nlohmann::json;

std::string_view to_string(Rank r) {
  switch (r) {
    case Rank::kBest: return "best";
    case Rank::kSecond: return "second";
    case Rank::kWorst: return "worst";
    case Rank::kNone: break;
  }
  return "";
}

std::string_view to_string(Granularity g) {
  return g == Granularity::kModelDataset ? "model-dataset" : "interaction";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  if (text == "model-dataset") return Granularity::kModelDataset;
  if (text == "interaction") return Granularity::kInteraction;
  return std::nullopt;
}

std::optional<CorrelationRequest> parse_correlation_request(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= text.size()) return std::nullopt;
  if (text.find(':', colon + 1) != std::string_view::npos) return std::nullopt;
  return CorrelationRequest{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

const AggregateCell* AggregateReport::find(std::string_view model, std::string_view dataset,
                                           std::string_view metric) const {
  for (const auto& c : cells) {
    if (c.model == model && c.dataset == dataset && c.metric == metric) return &c;
  }
  return nullptr;
}

std::vector<std::string> canonical_metric_order(std::vector<std::string> names) {
  static constexpr std::array<std::string_view, 13> kOrder{
      "St2Exp-P", "St2Exp-R", "St2Exp-F1", "StEnt-P", "StEnt-R", "StEnt-F1", "StCoh-P",
      "StCoh-R",  "StCoh-F1", "BLEU-4",    "ROUGE-1", "ROUGE-2", "ROUGE-L"};
  auto key = [](const std::string& n) {
    const auto it = std::find(kOrder.begin(), kOrder.end(), n);
    return std::make_pair(static_cast<std::size_t>(it - kOrder.begin()), n);
  };
  std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

namespace {

void note_first(std::vector<std::string>& seen, const std::string& v) {
  if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
}

using CellKey = std::tuple<std::string, std::string, std::string>;  // model, dataset, metric

struct Bucket {
  std::vector<std::pair<std::string, double>> values;  // (interaction_id, value)
  std::size_t degenerate = 0;
};

void sort_values(std::vector<std::pair<std::string, double>>& v) {
  std::sort(v.begin(), v.end());
}

std::optional<double> correlate(const std::vector<CorrelationPoint>& pts) {
  if (pts.size() < 2) return std::nullopt;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  try {
    return pearson_r(xs, ys);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kUndefinedCorrelation) return std::nullopt;
    throw;
  }
}

}  // namespace

AggregateReport aggregate(std::span<const MetricRecord> records, const ReportOptions& options) {
  AggregateReport rep;
  std::map<CellKey, Bucket> buckets;
  std::vector<std::string> metric_names;
  for (const auto& r : records) {
    if (r.metric_name == "StCoh-F1" && !options.include_stcoh_f1) continue;
    note_first(rep.models, r.model_name);
    note_first(rep.datasets, r.dataset);
    note_first(metric_names, r.metric_name);
    Bucket& b = buckets[{r.model_name, r.dataset, r.metric_name}];
    if (r.degenerate || !r.value) {
      ++b.degenerate;
    } else {
      b.values.emplace_back(r.interaction_id, *r.value);
    }
  }
  rep.metrics = canonical_metric_order(std::move(metric_names));

  for (auto& [key, b] : buckets) sort_values(b.values);

  for (const auto& dataset : rep.datasets) {
    for (const auto& metric : rep.metrics) {
      std::vector<AggregateCell> row;
      for (const auto& model : rep.models) {
        auto it = buckets.find({model, dataset, metric});
        if (it == buckets.end()) continue;
        const Bucket& b = it->second;
        AggregateCell cell{model, dataset, metric, std::nullopt, std::nullopt, b.values.size(), b.degenerate,
                           Rank::kNone};
        if (!b.values.empty()) {
          std::vector<double> xs;
          xs.reserve(b.values.size());
          for (const auto& v : b.values) xs.push_back(v.second);
          const double n = static_cast<double>(xs.size());
          const double mean = compensated_sum(xs) / n;
          std::vector<double> sq;
          sq.reserve(xs.size());
          for (double x : xs) sq.push_back((x - mean) * (x - mean));
          cell.mean = mean;
          cell.std = std::sqrt(std::max(0.0, compensated_sum(sq) / n));
        }
        row.push_back(std::move(cell));
      }

      std::vector<AggregateCell*> ranked;
      for (auto& c : row) {
        if (c.mean) ranked.push_back(&c);
      }
      std::sort(ranked.begin(), ranked.end(), [](const AggregateCell* a, const AggregateCell* b) {
        if (*a->mean != *b->mean) return *a->mean > *b->mean;
        return a->model < b->model;
      });
      if (ranked.size() >= 2) {
        ranked.front()->rank = Rank::kBest;
        ranked.back()->rank = Rank::kWorst;
        if (ranked.size() >= 3) ranked[1]->rank = Rank::kSecond;
      }
      for (auto& c : row) rep.cells.push_back(std::move(c));
    }
  }

  for (const auto& req : options.correlations) {
    CorrelationResult res{req.metric_x, req.metric_y, options.granularity, std::nullopt, {}};
    std::vector<std::string> models = rep.models;
    std::vector<std::string> datasets = rep.datasets;
    std::sort(models.begin(), models.end());
    std::sort(datasets.begin(), datasets.end());
    for (const auto& model : models) {
      for (const auto& dataset : datasets) {
        if (options.granularity == Granularity::kModelDataset) {
          const AggregateCell* cx = rep.find(model, dataset, req.metric_x);
          const AggregateCell* cy = rep.find(model, dataset, req.metric_y);
          if (cx != nullptr && cy != nullptr && cx->mean && cy->mean) {
            res.points.push_back({model, dataset, "", *cx->mean, *cy->mean});
          }
          continue;
        }
        auto bx = buckets.find({model, dataset, req.metric_x});
        auto by = buckets.find({model, dataset, req.metric_y});
        if (bx == buckets.end() || by == buckets.end()) continue;
        std::map<std::string, double> ys(by->second.values.begin(), by->second.values.end());
        for (const auto& [id, x] : bx->second.values) {
          auto y = ys.find(id);
          if (y != ys.end()) res.points.push_back({model, dataset, id, x, y->second});
        }
      }
    }
    res.r = correlate(res.points);
    rep.correlations.push_back(std::move(res));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string num(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string render_csv(const AggregateReport& rep) {
  std::string out = "dataset,model,metric,mean,std,count,degenerate_count,rank\n";
  for (const auto& c : rep.cells) {
    out += csv_field(c.dataset) + "," + csv_field(c.model) + "," + csv_field(c.metric) + "," + opt_num(c.mean) +
           "," + opt_num(c.std) + "," + std::to_string(c.count) + "," + std::to_string(c.degenerate_count) + "," +
           std::string(to_string(c.rank)) + "\n";
  }
  return out;
}

std::string render_jsonl(const AggregateReport& rep) {
  std::string out;
  for (const auto& c : rep.cells) {
    json j = {{"type", "aggregate"},
              {"dataset", c.dataset},
              {"model", c.model},
              {"metric", c.metric},
              {"mean", opt_json(c.mean)},
              {"std", opt_json(c.std)},
              {"count", c.count},
              {"degenerate_count", c.degenerate_count},
              {"rank", c.rank == Rank::kNone ? json(nullptr) : json(std::string(to_string(c.rank)))}};
    out += j.dump() + "\n";
  }
  for (const auto& r : rep.correlations) {
    json j = {{"type", "correlation"},
              {"metric_x", r.metric_x},
              {"metric_y", r.metric_y},
              {"granularity", std::string(to_string(r.granularity))},
              {"r", r.r ? json(*r.r) : json("n/a")},
              {"point_count", r.points.size()}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string render_markdown(const AggregateReport& rep) {
  std::ostringstream out;
  bool first = true;
  for (const auto& dataset : rep.datasets) {
    if (!first) out << "\n";
    first = false;
    out << "## " << md_escape(dataset) << "\n\n| Model |";
    for (const auto& m : rep.metrics) out << " " << md_escape(m) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < rep.metrics.size(); ++i) out << "---|";
    out << "\n";
    std::vector<std::string> notes;
    for (const auto& model : rep.models) {
      out << "| " << md_escape(model) << " |";
      for (const auto& metric : rep.metrics) {
        const AggregateCell* c = rep.find(model, dataset, metric);
        out << " ";
        if (c == nullptr || !c->mean) {
          out << "-";
        } else {
          out << num(*c->mean, "%.4f") << "<sub>" << num(*c->std, "%.4f") << "</sub>";
          if (c->rank != Rank::kNone) out << " [" << (c->rank == Rank::kSecond ? "2nd" : to_string(c->rank)) << "]";
        }
        out << " |";
        if (c != nullptr && c->degenerate_count > 0) {
          notes.push_back(model + " " + metric + ": " + std::to_string(c->degenerate_count));
        }
      }
      out << "\n";
    }
    if (!notes.empty()) {
      out << "\nDegenerate records excluded from means:\n";
      for (const auto& n : notes) out << "- " << md_escape(n) << "\n";
    }
  }
  if (!rep.correlations.empty()) {
    out << "\n## Correlations\n\n| X | Y | Granularity | r | Points |\n|---|---|---|---|---|\n";
    for (const auto& r : rep.correlations) {
      out << "| " << md_escape(r.metric_x) << " | " << md_escape(r.metric_y) << " | " << to_string(r.granularity)
          << " | " << (r.r ? num(*r.r, "%.4f") : std::string("n/a")) << " | " << r.points.size() << " |\n";
    }
  }
  return out.str();
}

std::string render_correlations_csv(const AggregateReport& rep) {
  std::string out = "metric_x,metric_y,granularity,r,point_count\n";
  for (const auto& r : rep.correlations) {
    out += csv_field(r.metric_x) + "," + csv_field(r.metric_y) + "," + std::string(to_string(r.granularity)) + "," +
           (r.r ? num(*r.r) : std::string("n/a")) + "," + std::to_string(r.points.size()) + "\n";
  }
  return out;
}

std::string render_correlation_points_csv(const AggregateReport& rep) {
  std::string out = "metric_x,metric_y,model,dataset,interaction_id,x,y\n";
  for (const auto& r : rep.correlations) {
    for (const auto& p : r.points) {
      out += csv_field(r.metric_x) + "," + csv_field(r.metric_y) + "," + csv_field(p.model) + "," +
             csv_field(p.dataset) + "," + csv_field(p.interaction_id) + "," + num(p.x) + "," + num(p.y) + "\n";
    }
  }
  return out;
}

}  // namespace stfact
