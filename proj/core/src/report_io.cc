// Copyright 2026 The DIPS Eval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "dips/error.h"
#include "dips/report.h"
#include "json.hpp"

namespace dips {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
std::optional<T> get_opt(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

Orientation parse_orientation(const std::string& name) {
  if (name == orientation_name(Orientation::kLowerBetter)) return Orientation::kLowerBetter;
  if (name == orientation_name(Orientation::kHigherBetter)) return Orientation::kHigherBetter;
  throw Error(ErrorCode::kMalformedHeader, "unknown orientation '" + name + "'");
}

BaselineMetric baseline_from(const std::string& name) {
  auto m = parse_baseline_metric(name);
  if (!m) throw Error(ErrorCode::kMalformedHeader, "unknown baseline metric '" + name + "'");
  return *m;
}

PseudoMetric pseudo_from(const std::string& name) {
  auto m = parse_pseudo_metric(name);
  if (!m) throw Error(ErrorCode::kMalformedHeader, "unknown pseudo metric '" + name + "'");
  return *m;
}

ojson warnings_json(const std::vector<Warning>& warnings) {
  ojson out = ojson::array();
  for (const auto& w : warnings) out.push_back({{"code", w.code}, {"message", w.message}});
  return out;
}

std::vector<Warning> warnings_from(const ojson& j) {
  std::vector<Warning> out;
  for (const auto& w : j) out.push_back({w.at("code").get<std::string>(),
                                         w.at("message").get<std::string>()});
  return out;
}

void append_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  out.append(buf.data(), ptr);
}

void append_opt(std::string& out, const std::optional<double>& v) {
  if (v) append_double(out, *v);
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  ojson j;
  j["schema_version"] = report.schema_version;
  j["manifest_digest"] = report.manifest_digest;
  j["class_count"] = report.class_count;
  j["iterations"] = report.iterations;

  const auto& pl = report.pseudo_labels;
  j["pseudo_labels"] = {{"sample_count", pl.sample_count},
                        {"cluster_sizes", pl.cluster_sizes},
                        {"converged", opt(pl.converged)},
                        {"final_log_likelihood", opt(pl.final_log_likelihood)}};

  ojson pseudo;
  pseudo["iterations"] = report.pseudo.iterations;
  pseudo["scenarios"] = ojson::array();
  for (const auto& s : report.pseudo.scenarios) pseudo["scenarios"].push_back(s.class_of_cluster);
  pseudo["metrics"] = ojson::array();
  for (const auto& t : report.pseudo.metrics) {
    pseudo["metrics"].push_back({{"metric", pseudo_metric_name(t.metric)},
                                 {"adopted_scenario", t.adopted_scenario},
                                 {"best_checkpoint", t.best_checkpoint},
                                 {"best_iteration", t.best_iteration},
                                 {"scenario_means", t.scenario_means},
                                 {"scores", t.scores}});
  }
  j["pseudo"] = std::move(pseudo);

  j["baselines"] = ojson::array();
  for (const auto& row : report.baselines) {
    ojson scores = ojson::array();
    for (const auto& s : row.scores) {
      scores.push_back({{"metric", metric_name(s.metric)},
                        {"value", s.value},
                        {"orientation", orientation_name(s.orientation)},
                        {"m", s.m},
                        {"n", s.n},
                        {"warnings", s.warnings}});
    }
    j["baselines"].push_back({{"iteration", row.iteration}, {"scores", std::move(scores)}});
  }

  j["true_metrics"] = ojson::array();
  for (const auto& row : report.true_metrics) {
    j["true_metrics"].push_back({{"iteration", row.iteration},
                                 {"balanced_accuracy", row.balanced_accuracy},
                                 {"auc", opt(row.auc)}});
  }

  j["curves"] = ojson::array();
  for (const auto& c : report.curves) {
    ojson entries = ojson::array();
    for (const auto& e : c.entries) {
      entries.push_back({{"rank", e.rank},
                         {"iteration", e.iteration},
                         {"metric_value", e.metric_value},
                         {"true_value", e.true_value}});
    }
    j["curves"].push_back({{"metric", c.metric},
                           {"true_metric", c.true_metric},
                           {"orientation", orientation_name(c.orientation)},
                           {"entries", std::move(entries)}});
  }

  j["panels"] = ojson::array();
  for (const auto& p : report.panels) {
    j["panels"].push_back({{"metric", p.metric},
                           {"true_metric", p.true_metric},
                           {"r_squared", opt(p.r_squared)},
                           {"pearson", opt(p.pearson)},
                           {"spearman", opt(p.spearman)},
                           {"kendall", opt(p.kendall)},
                           {"metric_values", p.metric_values},
                           {"true_values", p.true_values},
                           {"warnings", warnings_json(p.warnings)}});
  }

  j["picked"] = ojson::array();
  for (const auto& p : report.picked) {
    j["picked"].push_back({{"metric", p.metric},
                           {"iteration", p.iteration},
                           {"true_balanced_accuracy", p.true_balanced_accuracy},
                           {"true_auc", opt(p.true_auc)},
                           {"balanced_accuracy_place", opt(p.balanced_accuracy_place)},
                           {"auc_place", opt(p.auc_place)}});
  }

  j["warnings"] = warnings_json(report.warnings);
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
  EvaluationReport r;
  try {
    const ojson j = ojson::parse(text);
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw Error(ErrorCode::kMalformedHeader,
                  "unsupported report schema_version " + std::to_string(r.schema_version));
    }
    r.manifest_digest = j.at("manifest_digest").get<std::string>();
    r.class_count = j.at("class_count").get<int>();
    r.iterations = j.at("iterations").get<std::vector<std::int64_t>>();

    const auto& pl = j.at("pseudo_labels");
    r.pseudo_labels.sample_count = pl.at("sample_count").get<std::size_t>();
    r.pseudo_labels.cluster_sizes = pl.at("cluster_sizes").get<std::vector<std::size_t>>();
    r.pseudo_labels.converged = get_opt<bool>(pl, "converged");
    r.pseudo_labels.final_log_likelihood = get_opt<double>(pl, "final_log_likelihood");

    const auto& ps = j.at("pseudo");
    r.pseudo.iterations = ps.at("iterations").get<std::vector<std::int64_t>>();
    for (const auto& s : ps.at("scenarios")) r.pseudo.scenarios.push_back({s.get<std::vector<int>>()});
    for (const auto& t : ps.at("metrics")) {
      PseudoMetricTable table;
      table.metric = pseudo_from(t.at("metric").get<std::string>());
      table.adopted_scenario = t.at("adopted_scenario").get<std::size_t>();
      table.best_checkpoint = t.at("best_checkpoint").get<std::size_t>();
      table.best_iteration = t.at("best_iteration").get<std::int64_t>();
      table.scenario_means = t.at("scenario_means").get<std::vector<double>>();
      table.scores = t.at("scores").get<std::vector<std::vector<double>>>();
      r.pseudo.metrics.push_back(std::move(table));
    }

    for (const auto& row : j.at("baselines")) {
      BaselineRow b;
      b.iteration = row.at("iteration").get<std::int64_t>();
      for (const auto& s : row.at("scores")) {
        BaselineScore score;
        score.metric = baseline_from(s.at("metric").get<std::string>());
        score.value = s.at("value").get<double>();
        score.orientation = parse_orientation(s.at("orientation").get<std::string>());
        score.m = s.at("m").get<std::size_t>();
        score.n = s.at("n").get<std::size_t>();
        score.warnings = s.at("warnings").get<std::vector<std::string>>();
        b.scores.push_back(std::move(score));
      }
      r.baselines.push_back(std::move(b));
    }

    for (const auto& row : j.at("true_metrics")) {
      r.true_metrics.push_back({row.at("iteration").get<std::int64_t>(),
                                row.at("balanced_accuracy").get<double>(),
                                get_opt<double>(row, "auc")});
    }

    for (const auto& c : j.at("curves")) {
      RankingCurve curve;
      curve.metric = c.at("metric").get<std::string>();
      curve.true_metric = c.at("true_metric").get<std::string>();
      curve.orientation = parse_orientation(c.at("orientation").get<std::string>());
      for (const auto& e : c.at("entries")) {
        curve.entries.push_back({e.at("rank").get<int>(), e.at("iteration").get<std::int64_t>(),
                                 e.at("metric_value").get<double>(),
                                 e.at("true_value").get<double>()});
      }
      r.curves.push_back(std::move(curve));
    }

    for (const auto& p : j.at("panels")) {
      CorrelationPanel panel;
      panel.metric = p.at("metric").get<std::string>();
      panel.true_metric = p.at("true_metric").get<std::string>();
      panel.r_squared = get_opt<double>(p, "r_squared");
      panel.pearson = get_opt<double>(p, "pearson");
      panel.spearman = get_opt<double>(p, "spearman");
      panel.kendall = get_opt<double>(p, "kendall");
      panel.metric_values = p.at("metric_values").get<std::vector<double>>();
      panel.true_values = p.at("true_values").get<std::vector<double>>();
      panel.warnings = warnings_from(p.at("warnings"));
      r.panels.push_back(std::move(panel));
    }

    for (const auto& p : j.at("picked")) {
      r.picked.push_back({p.at("metric").get<std::string>(), p.at("iteration").get<std::int64_t>(),
                          p.at("true_balanced_accuracy").get<double>(),
                          get_opt<double>(p, "true_auc"),
                          get_opt<int>(p, "balanced_accuracy_place"),
                          get_opt<int>(p, "auc_place")});
    }

    r.warnings = warnings_from(j.at("warnings"));
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("report JSON: ") + e.what());
  }
  return r;
}

void save_report(const EvaluationReport& report, const fs::path& path) {
  write_file(path, report_to_json(report));
}

EvaluationReport load_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return report_from_json(ss.str());
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void save_report_tables(const EvaluationReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "curves", ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + (dir / "curves").string());

  // pseudo_scores.csv: one row per checkpoint, adopted-scenario score per metric.
  {
    std::string out = "iteration";
    for (const auto& t : report.pseudo.metrics) {
      out += ",pseudo_" + std::string(pseudo_metric_name(t.metric));
    }
    out += "\n";
    std::vector<std::vector<double>> adopted;
    for (const auto& t : report.pseudo.metrics) adopted.push_back(t.adopted_scores());
    for (std::size_t i = 0; i < report.pseudo.iterations.size(); ++i) {
      out += std::to_string(report.pseudo.iterations[i]);
      for (const auto& col : adopted) {
        out += ",";
        append_double(out, col[i]);
      }
      out += "\n";
    }
    write_file(dir / "pseudo_scores.csv", out);
  }

  // baselines.csv: long format, one row per (checkpoint, metric).
  {
    std::string out = "iteration,metric,value,orientation\n";
    for (const auto& row : report.baselines) {
      for (const auto& s : row.scores) {
        out += std::to_string(row.iteration) + "," + std::string(metric_name(s.metric)) + ",";
        append_double(out, s.value);
        out += "," + std::string(orientation_name(s.orientation)) + "\n";
      }
    }
    write_file(dir / "baselines.csv", out);
  }

  {
    std::string out =
        "metric,iteration,true_balanced_accuracy,true_auc,balanced_accuracy_place,auc_place\n";
    for (const auto& p : report.picked) {
      out += p.metric + "," + std::to_string(p.iteration) + ",";
      append_double(out, p.true_balanced_accuracy);
      out += ",";
      append_opt(out, p.true_auc);
      out += ",";
      if (p.balanced_accuracy_place) out += std::to_string(*p.balanced_accuracy_place);
      out += ",";
      if (p.auc_place) out += std::to_string(*p.auc_place);
      out += "\n";
    }
    write_file(dir / "picked.csv", out);
  }

  for (const auto& c : report.curves) {
    std::string out = "rank,metric_value,true_value\n";
    for (const auto& e : c.entries) {
      out += std::to_string(e.rank) + ",";
      append_double(out, e.metric_value);
      out += ",";
      append_double(out, e.true_value);
      out += "\n";
    }
    write_file(dir / "curves" / (c.true_metric + "__" + c.metric + ".csv"), out);
  }
}

}  // namespace dips
