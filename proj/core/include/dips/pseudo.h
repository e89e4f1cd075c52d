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
// Pseudo-supervised checkpoint scoring.
//
// Features of the untranslated target validation set are clustered into N
// groups; each bijection cluster -> class (a "scenario") turns the clusters
// into pseudo ground truth. Every checkpoint's predictions are scored against
// every scenario, the scenario with the best mean score over checkpoints is
// adopted, and the best checkpoint under that scenario is selected. Each
// metric adopts its scenario independently.

#ifndef DIPS_PSEUDO_H_
#define DIPS_PSEUDO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dips/data_io.h"
#include "dips/gmm.h"

namespace dips {

// Largest class count for which all N! scenarios are enumerated.
inline constexpr int kMaxScenarioClasses = 8;

struct PcaConfig {
  // Retained components: min(d, n - 1, max_components).
  int max_components = 64;
  bool whiten = true;
};

struct PcaModel {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // d x r, columns are unit principal axes
  Eigen::VectorXd scale;       // per-component divisor (1 when not whitened)

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

// Exact PCA by thin SVD of the centered data. Axis signs are fixed so the
// largest-magnitude loading of every component is positive.
PcaModel fit_pca(const Eigen::MatrixXd& x, const PcaConfig& cfg);

struct PseudoLabeling {
  std::vector<std::string> ids;
  std::vector<int> cluster_of;
  int n_clusters = 0;
  // Present when the labeling came from a fit in this process.
  std::optional<bool> converged;
  std::optional<double> final_log_likelihood;

  friend bool operator==(const PseudoLabeling&, const PseudoLabeling&) = default;
};

// Validates ids, ranges and that every cluster is non-empty (EmptyCluster).
PseudoLabeling make_pseudo_labeling(std::vector<std::string> ids, std::vector<int> cluster_of,
                                    int n_clusters);

PseudoLabeling generate_pseudo_labels(const FeatureMatrix& target_features, int n_clusters,
                                      GmmConfig cfg,
                                      const std::optional<PcaConfig>& pca = std::nullopt);

// Cluster file round trip ("id,cluster" CSV).
LabelFile to_label_file(const PseudoLabeling& pseudo);
PseudoLabeling from_label_file(const LabelFile& labels, int n_clusters);

struct Scenario {
  std::vector<int> class_of_cluster;  // a permutation of 0..N-1

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// All N! bijections in lexicographic order. Requires 2 <= N <= 8.
std::vector<Scenario> enumerate_scenarios(int n_classes);

// Pseudo ground truth for every sample of `pseudo`, in its id order.
std::vector<int> scenario_labels(const PseudoLabeling& pseudo, const Scenario& s);

// Hard predictions are the row argmax (ties -> lowest class). Macro recall
// over the pseudo classes.
double pseudo_balanced_accuracy(const PseudoLabeling& pseudo, const Scenario& s,
                                const PredictionSet& preds);

// Binary only. Scores are the class-1 probability column; pseudo class 1 is
// the positive class.
double pseudo_auc(const PseudoLabeling& pseudo, const Scenario& s, const PredictionSet& preds);

enum class PseudoMetric { kBalancedAccuracy, kAuc };

std::string_view pseudo_metric_name(PseudoMetric metric);
// Accepts "balanced_accuracy" / "auc".
std::optional<PseudoMetric> parse_pseudo_metric(std::string_view name);

struct PseudoMetricTable {
  PseudoMetric metric = PseudoMetric::kBalancedAccuracy;
  std::vector<std::vector<double>> scores;  // [checkpoint][scenario]
  std::vector<double> scenario_means;       // mean over checkpoints
  std::size_t adopted_scenario = 0;         // argmax of means, ties -> first
  std::size_t best_checkpoint = 0;          // argmax under the adopted scenario
  std::int64_t best_iteration = 0;          // ties -> lowest iteration

  // Per-checkpoint scores under the adopted scenario.
  std::vector<double> adopted_scores() const;

  friend bool operator==(const PseudoMetricTable&, const PseudoMetricTable&) = default;
};

struct PseudoScoreTable {
  std::vector<std::int64_t> iterations;
  std::vector<Scenario> scenarios;
  std::vector<PseudoMetricTable> metrics;

  const PseudoMetricTable* find(PseudoMetric metric) const;

  friend bool operator==(const PseudoScoreTable&, const PseudoScoreTable&) = default;
};

struct CheckpointPredictions {
  std::int64_t iteration = 0;
  PredictionSet predictions;
};

// Checkpoints must be in strictly increasing iteration order.
PseudoScoreTable evaluate_checkpoints(const std::vector<CheckpointPredictions>& checkpoints,
                                      const PseudoLabeling& pseudo,
                                      const std::vector<PseudoMetric>& metrics);

// Loads each checkpoint's prediction file in turn; errors name the iteration.
PseudoScoreTable evaluate_checkpoints(const CheckpointManifest& manifest,
                                      const PseudoLabeling& pseudo,
                                      const std::vector<PseudoMetric>& metrics);

}  // namespace dips

#endif  // DIPS_PSEUDO_H_
