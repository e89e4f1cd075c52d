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
// Checkpoint ranking, correlation panels, picked-model comparison and the
// end-to-end report that ties the pseudo metrics and the baselines together.
//
// Metric names used throughout reports:
//   pseudo_balanced_accuracy, pseudo_auc        adopted-scenario pseudo scores
//   fid, kid, mmd_linear, mmd_gaussian, is      baselines
//   true_balanced_accuracy, true_auc            validation mode only

#ifndef DIPS_REPORT_H_
#define DIPS_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dips/baselines.h"
#include "dips/data_io.h"
#include "dips/gmm.h"
#include "dips/pseudo.h"

namespace dips {

inline constexpr int kReportSchemaVersion = 1;

struct Warning {
  std::string code;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

struct RankingEntry {
  int rank = 0;  // 1 = best
  std::int64_t iteration = 0;
  double metric_value = 0.0;
  double true_value = 0.0;

  friend bool operator==(const RankingEntry&, const RankingEntry&) = default;
};

struct RankingCurve {
  std::string metric;
  std::string true_metric;
  Orientation orientation = Orientation::kHigherBetter;
  std::vector<RankingEntry> entries;  // best first

  friend bool operator==(const RankingCurve&, const RankingCurve&) = default;
};

// Stable best-first ordering under `orientation`, ties broken by the lower
// iteration. true_values carries the true metric per checkpoint; an empty span
// throws MissingTrueLabels.
RankingCurve rank_checkpoints(std::string metric, std::span<const std::int64_t> iterations,
                              std::span<const double> scores, Orientation orientation,
                              std::span<const double> true_values,
                              std::string true_metric = "true");

struct CorrelationPanel {
  std::string metric;
  std::string true_metric;
  std::vector<double> metric_values;
  std::vector<double> true_values;
  std::optional<double> r_squared;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
  std::vector<Warning> warnings;

  friend bool operator==(const CorrelationPanel&, const CorrelationPanel&) = default;
};

// Never throws on degenerate data: a constant input leaves the coefficients
// empty and records a ZeroVariance warning. Raw metric values are used, so
// lower-is-better metrics show negative correlations when they work.
CorrelationPanel correlate(std::string metric, std::span<const double> metric_values,
                           std::span<const double> true_values,
                           std::string true_metric = "true");

struct BaselineRow {
  std::int64_t iteration = 0;
  std::vector<BaselineScore> scores;

  friend bool operator==(const BaselineRow&, const BaselineRow&) = default;
};

struct TrueMetricsRow {
  std::int64_t iteration = 0;
  double balanced_accuracy = 0.0;
  std::optional<double> auc;  // binary only

  friend bool operator==(const TrueMetricsRow&, const TrueMetricsRow&) = default;
};

// True performance of the checkpoint each metric would pick. Places rank the
// competing metrics (dense, 1 = best, 2 = second best); rows for the true
// metrics themselves carry no place.
struct PickedModelRow {
  std::string metric;
  std::int64_t iteration = 0;
  double true_balanced_accuracy = 0.0;
  std::optional<double> true_auc;
  std::optional<int> balanced_accuracy_place;
  std::optional<int> auc_place;

  friend bool operator==(const PickedModelRow&, const PickedModelRow&) = default;
};

struct PseudoLabelSummary {
  std::size_t sample_count = 0;
  std::vector<std::size_t> cluster_sizes;
  std::optional<bool> converged;
  std::optional<double> final_log_likelihood;

  friend bool operator==(const PseudoLabelSummary&, const PseudoLabelSummary&) = default;
};

struct EvaluationReport {
  int schema_version = kReportSchemaVersion;
  std::string manifest_digest;
  int class_count = 2;
  std::vector<std::int64_t> iterations;
  PseudoLabelSummary pseudo_labels;
  PseudoScoreTable pseudo;
  std::vector<BaselineRow> baselines;
  std::vector<TrueMetricsRow> true_metrics;  // empty without true labels
  std::vector<RankingCurve> curves;
  std::vector<CorrelationPanel> panels;
  std::vector<PickedModelRow> picked;
  std::vector<Warning> warnings;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct ReportOptions {
  // Seeds the GMM, KID subsets and the MMD bandwidth sample.
  std::uint64_t seed = 0;
  GmmConfig gmm;
  std::optional<PcaConfig> pca;
  // Empty means every metric applicable to the class count.
  std::vector<PseudoMetric> pseudo_metrics;
  // Empty means every baseline. Feature-based baselines are skipped (with a
  // warning) for checkpoints without features.
  std::vector<BaselineMetric> baseline_metrics;
  std::optional<double> mmd_bandwidth;  // median heuristic when absent
  int kid_subsets = 100;
  std::optional<std::size_t> kid_subset_size;  // min(1000, m, n) when absent
  int is_splits = 1;
  bool skip_baselines = false;
};

struct CheckpointData {
  std::int64_t iteration = 0;
  PredictionSet predictions;
  std::optional<FeatureMatrix> features;
};

// Everything build_report needs, already in memory.
struct EvaluationInputs {
  int class_count = 2;
  FeatureMatrix target_features;
  std::optional<FeatureMatrix> reference_features;
  std::vector<CheckpointData> checkpoints;
  std::optional<PseudoLabeling> pseudo_labels;  // clustered from target when absent
  std::optional<LabelFile> true_labels;         // enables validation mode
  std::string digest;
};

// Stable 64-bit FNV-1a digest (hex) of the manifest's canonical JSON form.
std::string manifest_digest(const CheckpointManifest& manifest);

EvaluationInputs load_inputs(const CheckpointManifest& manifest,
                             const std::optional<std::filesystem::path>& true_labels_path,
                             const std::optional<std::filesystem::path>& pseudo_labels_path);

EvaluationReport build_report(const EvaluationInputs& inputs, const ReportOptions& options);
EvaluationReport build_report(const CheckpointManifest& manifest, const ReportOptions& options,
                              const std::optional<std::filesystem::path>& true_labels_path =
                                  std::nullopt,
                              const std::optional<std::filesystem::path>& pseudo_labels_path =
                                  std::nullopt);

// JSON report (schema_version field first-class). Output is deterministic.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);
void save_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport load_report(const std::filesystem::path& path);

// Writes pseudo_scores.csv, baselines.csv, picked.csv and one
// curves/<true_metric>__<metric>.csv per ranking curve with header
// "rank,metric_value,true_value" into `dir`.
void save_report_tables(const EvaluationReport& report, const std::filesystem::path& dir);

}  // namespace dips

#endif  // DIPS_REPORT_H_
