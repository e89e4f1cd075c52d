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
//
// dips: checkpoint evaluation from the command line.
//
//   dips cluster   --features F --classes N --out labels.csv
//   dips evaluate  --manifest M [--out DIR]
//   dips validate  --manifest M --labels L [--out DIR]
//   dips baselines --real F --fake F [--predictions P] [--out FILE]
//
// Exit status: 0 success, 1 input error, 2 numerical failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dips/baselines.h"
#include "dips/data_io.h"
#include "dips/error.h"
#include "dips/gmm.h"
#include "dips/pseudo.h"
#include "dips/report.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string metrics;
  bool pca = false;
  int pca_components = 64;
  std::optional<double> mmd_bandwidth;
  int kid_subsets = 100;
  std::optional<std::size_t> kid_subset_size;
  int is_splits = 1;
  std::string out;
};

struct MetricSelection {
  std::vector<dips::PseudoMetric> pseudo;
  std::vector<dips::BaselineMetric> baselines;
  bool baselines_listed = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Names: balanced_accuracy / auc (optionally prefixed "pseudo_"), fid, kid,
// mmd_linear, mmd_gaussian, is, or "none" to skip baselines.
MetricSelection parse_metrics(const std::string& text) {
  MetricSelection sel;
  for (const auto& raw : split_list(text)) {
    std::string name = raw;
    if (name == "none") {
      sel.baselines_listed = true;
      continue;
    }
    if (name.rfind("pseudo_", 0) == 0) name = name.substr(7);
    if (auto p = dips::parse_pseudo_metric(name)) {
      sel.pseudo.push_back(*p);
    } else if (auto b = dips::parse_baseline_metric(name)) {
      sel.baselines.push_back(*b);
      sel.baselines_listed = true;
    } else {
      throw dips::Error(dips::ErrorCode::kInvalidArgument, "unknown metric '" + raw + "'");
    }
  }
  return sel;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool report_flags) {
  cmd->add_option("--seed", f.seed, "Seed for GMM, KID subsets and bandwidth sampling");
  cmd->add_option("--metrics", f.metrics, "Comma-separated metric names");
  cmd->add_option("--mmd-bandwidth", f.mmd_bandwidth,
                  "Gaussian MMD bandwidth (median heuristic when absent)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--kid-subsets", f.kid_subsets, "KID subset count")->check(CLI::PositiveNumber);
  cmd->add_option("--kid-subset-size", f.kid_subset_size, "KID subset size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--is-splits", f.is_splits, "Inception Score splits")
      ->check(CLI::PositiveNumber);
  if (report_flags) {
    cmd->add_flag("--pca", f.pca, "Project features with whitened PCA before clustering");
    cmd->add_option("--pca-components", f.pca_components, "Maximum PCA components")
        ->check(CLI::PositiveNumber);
  }
}

dips::ReportOptions report_options(const CommonFlags& f) {
  dips::ReportOptions o;
  o.seed = f.seed;
  if (f.pca) o.pca = dips::PcaConfig{f.pca_components, true};
  const MetricSelection sel = parse_metrics(f.metrics);
  o.pseudo_metrics = sel.pseudo;
  o.baseline_metrics = sel.baselines;
  o.skip_baselines = sel.baselines_listed && sel.baselines.empty();
  o.mmd_bandwidth = f.mmd_bandwidth;
  o.kid_subsets = f.kid_subsets;
  o.kid_subset_size = f.kid_subset_size;
  o.is_splits = f.is_splits;
  return o;
}

void print_warnings(const std::vector<dips::Warning>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w.code << ": " << w.message << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw dips::Error(dips::ErrorCode::kIoFailure, "cannot write " + path.string());
}

int run_cluster(const std::string& features_path, int classes, const CommonFlags& f) {
  const dips::FeatureMatrix features = dips::load_features(features_path);
  dips::GmmConfig cfg;
  cfg.seed = f.seed;
  std::optional<dips::PcaConfig> pca;
  if (f.pca) pca = dips::PcaConfig{f.pca_components, true};
  const dips::PseudoLabeling pseudo =
      dips::generate_pseudo_labels(features, classes, cfg, pca);
  if (pseudo.converged && !*pseudo.converged) {
    std::cerr << "warning: GmmNotConverged: EM hit max_iter\n";
  }
  dips::save_labels(dips::to_label_file(pseudo), f.out, "cluster");
  return kExitOk;
}

int run_report(const std::string& manifest_path, const std::optional<std::string>& labels,
               const std::optional<std::string>& pseudo_labels,
               const std::optional<int>& classes, const CommonFlags& f) {
  const dips::CheckpointManifest manifest = dips::load_manifest(manifest_path);
  if (classes && *classes != manifest.class_count) {
    throw dips::Error(dips::ErrorCode::kInvalidArgument,
                      "--classes " + std::to_string(*classes) + " disagrees with manifest (" +
                          std::to_string(manifest.class_count) + ")");
  }
  std::optional<fs::path> labels_path;
  if (labels) labels_path = *labels;
  std::optional<fs::path> pseudo_path;
  if (pseudo_labels) pseudo_path = *pseudo_labels;
  const dips::EvaluationReport report =
      dips::build_report(manifest, report_options(f), labels_path, pseudo_path);
  print_warnings(report.warnings);
  if (f.out.empty()) {
    std::cout << dips::report_to_json(report);
    return kExitOk;
  }
  const fs::path dir(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw dips::Error(dips::ErrorCode::kIoFailure, "cannot create " + dir.string());
  dips::save_report(report, dir / "report.json");
  dips::save_report_tables(report, dir);
  return kExitOk;
}

int run_baselines(const std::string& real_path, const std::string& fake_path,
                  const std::optional<std::string>& predictions_path, const CommonFlags& f) {
  const dips::FeatureMatrix real = dips::load_features(real_path);
  const dips::FeatureMatrix fake = dips::load_features(fake_path);
  MetricSelection sel = parse_metrics(f.metrics);
  if (sel.baselines.empty()) {
    sel.baselines = {dips::BaselineMetric::kFid, dips::BaselineMetric::kKid,
                     dips::BaselineMetric::kMmdLinear, dips::BaselineMetric::kMmdGaussian};
    if (predictions_path) sel.baselines.push_back(dips::BaselineMetric::kInceptionScore);
  }
  nlohmann::ordered_json out;
  out["schema_version"] = dips::kReportSchemaVersion;
  out["scores"] = nlohmann::ordered_json::array();
  for (auto metric : sel.baselines) {
    dips::BaselineScore s;
    switch (metric) {
      case dips::BaselineMetric::kFid:
        s = dips::fid(real, fake);
        break;
      case dips::BaselineMetric::kKid: {
        const std::size_t subset =
            f.kid_subset_size ? *f.kid_subset_size
                              : std::min<std::size_t>({1000, real.rows(), fake.rows()});
        s = dips::kid(real, fake, subset, f.kid_subsets, f.seed);
        break;
      }
      case dips::BaselineMetric::kMmdLinear:
        s = dips::mmd_unbiased(real, fake, dips::LinearKernel{});
        break;
      case dips::BaselineMetric::kMmdGaussian: {
        double bw = 0.0;
        if (f.mmd_bandwidth) {
          bw = *f.mmd_bandwidth;
        } else {
          // Same canonical row order as the FeatureMatrix overloads.
          auto sorted = [](const dips::FeatureMatrix& m) {
            std::vector<std::size_t> order(m.rows());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return m.ids()[a] < m.ids()[b]; });
            Eigen::MatrixXd out(m.values().rows(), m.values().cols());
            for (std::size_t i = 0; i < order.size(); ++i) {
              out.row(static_cast<Eigen::Index>(i)) =
                  m.values().row(static_cast<Eigen::Index>(order[i]));
            }
            return out;
          };
          bw = dips::median_heuristic_bandwidth(sorted(real), sorted(fake), f.seed);
        }
        s = dips::mmd_unbiased(real, fake, dips::GaussianKernel{bw});
        break;
      }
      case dips::BaselineMetric::kInceptionScore:
        if (!predictions_path) {
          throw dips::Error(dips::ErrorCode::kInvalidArgument, "metric 'is' needs --predictions");
        }
        s = dips::inception_score(dips::load_predictions(*predictions_path), f.is_splits);
        break;
    }
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
    out["scores"].push_back({{"metric", dips::metric_name(s.metric)},
                             {"value", s.value},
                             {"orientation", dips::orientation_name(s.orientation)},
                             {"m", s.m},
                             {"n", s.n},
                             {"warnings", s.warnings}});
  }
  const std::string text = out.dump(2) + "\n";
  if (f.out.empty()) {
    std::cout << text;
  } else {
    write_text(f.out, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DIPS checkpoint evaluation toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string features_path;
  std::string manifest_path;
  std::string real_path;
  std::string fake_path;
  std::optional<std::string> labels_path;
  std::optional<std::string> pseudo_labels_path;
  std::optional<std::string> predictions_path;
  std::optional<int> classes;
  int cluster_classes = 2;

  CLI::App* cluster = app.add_subcommand("cluster", "Cluster target features into pseudo labels");
  cluster->add_option("--features", features_path, "Target feature file")->required();
  cluster->add_option("--classes", cluster_classes, "Number of classes N")
      ->required()
      ->check(CLI::Range(2, dips::kMaxScenarioClasses));
  cluster->add_option("--out", flags.out, "Output id,cluster CSV")->required();
  add_common(cluster, flags, true);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score checkpoints with pseudo metrics");
  evaluate->add_option("--manifest", manifest_path, "Checkpoint manifest JSON")->required();
  evaluate->add_option("--pseudo-labels", pseudo_labels_path, "Precomputed id,cluster CSV");
  evaluate->add_option("--classes", classes, "Expected class count");
  evaluate->add_option("--out", flags.out, "Output directory (stdout JSON when absent)");
  add_common(evaluate, flags, true);

  CLI::App* validate =
      app.add_subcommand("validate", "Evaluate with true labels: curves, panels, picks");
  validate->add_option("--manifest", manifest_path, "Checkpoint manifest JSON")->required();
  validate->add_option("--labels", labels_path, "True id,label CSV")->required();
  validate->add_option("--pseudo-labels", pseudo_labels_path, "Precomputed id,cluster CSV");
  validate->add_option("--classes", classes, "Expected class count");
  validate->add_option("--out", flags.out, "Output directory (stdout JSON when absent)");
  add_common(validate, flags, true);

  CLI::App* baselines = app.add_subcommand("baselines", "Baseline metrics for two feature sets");
  baselines->add_option("--real", real_path, "Reference feature file")->required();
  baselines->add_option("--fake", fake_path, "Generated feature file")->required();
  baselines->add_option("--predictions", predictions_path, "Prediction CSV for IS");
  baselines->add_option("--out", flags.out, "Output JSON file (stdout when absent)");
  add_common(baselines, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*cluster) return run_cluster(features_path, cluster_classes, flags);
    if (*evaluate) return run_report(manifest_path, std::nullopt, pseudo_labels_path, classes, flags);
    if (*validate) return run_report(manifest_path, labels_path, pseudo_labels_path, classes, flags);
    if (*baselines) return run_baselines(real_path, fake_path, predictions_path, flags);
  } catch (const dips::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dips::is_numerical(e.code()) ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
