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

#include "dips/pseudo.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

#include "dips/error.h"
#include "dips/stats.h"

namespace dips {
namespace {

// Predictions re-ordered into the pseudo labeling's id order.
struct AlignedPredictions {
  std::vector<int> hard;
  std::vector<double> positive_score;  // class-1 probability
};

AlignedPredictions align(const PseudoLabeling& pseudo, const PredictionSet& preds) {
  if (preds.class_count() != pseudo.n_clusters) {
    throw Error(ErrorCode::kDimMismatch,
                "predictions have " + std::to_string(preds.class_count()) + " classes, labeling has " +
                    std::to_string(pseudo.n_clusters) + " clusters");
  }
  if (preds.rows() != pseudo.ids.size()) {
    throw Error(ErrorCode::kIdMismatch,
                std::to_string(preds.rows()) + " predictions for " +
                    std::to_string(pseudo.ids.size()) + " pseudo-labeled samples");
  }
  const auto index = index_ids(preds.ids());
  const std::vector<int> hard = preds.hard_labels();
  AlignedPredictions out;
  out.hard.reserve(pseudo.ids.size());
  out.positive_score.reserve(pseudo.ids.size());
  for (const auto& id : pseudo.ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw Error(ErrorCode::kIdMismatch, "no prediction for id '" + id + "'");
    }
    out.hard.push_back(hard[it->second]);
    out.positive_score.push_back(preds.probs()(static_cast<Eigen::Index>(it->second), 1));
  }
  return out;
}

double balanced_accuracy_aligned(const std::vector<int>& truth, const AlignedPredictions& a,
                                 int n_classes) {
  return balanced_accuracy(confusion(truth, a.hard, n_classes));
}

double auc_aligned(const std::vector<int>& truth, const AlignedPredictions& a, int n_classes) {
  if (n_classes != 2) {
    throw Error(ErrorCode::kNotBinary,
                "pseudo AUC is defined for two classes, got " + std::to_string(n_classes));
  }
  return roc_auc(a.positive_score, truth);
}

double score_one(PseudoMetric metric, const std::vector<int>& truth, const AlignedPredictions& a,
                 int n_classes) {
  return metric == PseudoMetric::kBalancedAccuracy ? balanced_accuracy_aligned(truth, a, n_classes)
                                                   : auc_aligned(truth, a, n_classes);
}

void finalize(PseudoMetricTable& table, const std::vector<std::int64_t>& iterations) {
  const std::size_t n_scenarios = table.scores.empty() ? 0 : table.scores.front().size();
  table.scenario_means.assign(n_scenarios, 0.0);
  for (std::size_t s = 0; s < n_scenarios; ++s) {
    double sum = 0.0;
    for (const auto& row : table.scores) sum += row[s];
    table.scenario_means[s] = sum / static_cast<double>(table.scores.size());
  }
  table.adopted_scenario = 0;
  for (std::size_t s = 1; s < n_scenarios; ++s) {
    if (table.scenario_means[s] > table.scenario_means[table.adopted_scenario]) {
      table.adopted_scenario = s;
    }
  }
  // Iterations are increasing, so the first maximum is the lowest iteration.
  table.best_checkpoint = 0;
  for (std::size_t c = 1; c < table.scores.size(); ++c) {
    if (table.scores[c][table.adopted_scenario] >
        table.scores[table.best_checkpoint][table.adopted_scenario]) {
      table.best_checkpoint = c;
    }
  }
  table.best_iteration = iterations[table.best_checkpoint];
}

void check_metrics(const std::vector<PseudoMetric>& metrics, int n_classes) {
  if (metrics.empty()) throw Error(ErrorCode::kInvalidArgument, "no pseudo metrics requested");
  for (auto m : metrics) {
    if (m == PseudoMetric::kAuc && n_classes != 2) {
      throw Error(ErrorCode::kNotBinary,
                  "pseudo AUC requires two classes, got " + std::to_string(n_classes));
    }
  }
}

}  // namespace

PseudoLabeling make_pseudo_labeling(std::vector<std::string> ids, std::vector<int> cluster_of,
                                    int n_clusters) {
  if (ids.size() != cluster_of.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(ids.size()) + " ids vs " + std::to_string(cluster_of.size()) +
                    " cluster labels");
  }
  if (n_clusters < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 clusters");
  index_ids(ids);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_clusters), 0);
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    if (cluster_of[i] < 0 || cluster_of[i] >= n_clusters) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "cluster " + std::to_string(cluster_of[i]) + " for id '" + ids[i] + "'");
    }
    ++sizes[static_cast<std::size_t>(cluster_of[i])];
  }
  for (int c = 0; c < n_clusters; ++c) {
    if (sizes[static_cast<std::size_t>(c)] == 0) {
      throw Error(ErrorCode::kEmptyCluster, "cluster " + std::to_string(c) + " has no samples");
    }
  }
  PseudoLabeling out;
  out.ids = std::move(ids);
  out.cluster_of = std::move(cluster_of);
  out.n_clusters = n_clusters;
  return out;
}

PseudoLabeling generate_pseudo_labels(const FeatureMatrix& target_features, int n_clusters,
                                      GmmConfig cfg, const std::optional<PcaConfig>& pca) {
  if (n_clusters < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 clusters");
  cfg.n_components = n_clusters;
  GmmFit fit = pca ? fit_gmm(fit_pca(target_features.values(), *pca)
                                 .transform(target_features.values()),
                             cfg)
                   : fit_gmm(target_features.values(), cfg);
  PseudoLabeling out =
      make_pseudo_labeling(target_features.ids(), std::move(fit.assignments), n_clusters);
  out.converged = fit.converged;
  out.final_log_likelihood = fit.final_log_likelihood();
  return out;
}

LabelFile to_label_file(const PseudoLabeling& pseudo) {
  return LabelFile{pseudo.ids, pseudo.cluster_of};
}

PseudoLabeling from_label_file(const LabelFile& labels, int n_clusters) {
  return make_pseudo_labeling(labels.ids, labels.labels, n_clusters);
}

std::vector<Scenario> enumerate_scenarios(int n_classes) {
  if (n_classes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "scenarios need at least 2 classes");
  }
  if (n_classes > kMaxScenarioClasses) {
    throw Error(ErrorCode::kTooManyClasses,
                std::to_string(n_classes) + " classes would need " + std::to_string(n_classes) +
                    "! scenarios; the count grows factorially, limit is " +
                    std::to_string(kMaxScenarioClasses));
  }
  std::vector<int> perm(static_cast<std::size_t>(n_classes));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Scenario> out;
  do {
    out.push_back(Scenario{perm});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<int> scenario_labels(const PseudoLabeling& pseudo, const Scenario& s) {
  if (static_cast<int>(s.class_of_cluster.size()) != pseudo.n_clusters) {
    throw Error(ErrorCode::kDimMismatch, "scenario size does not match the cluster count");
  }
  std::vector<int> labels;
  labels.reserve(pseudo.cluster_of.size());
  for (int c : pseudo.cluster_of) labels.push_back(s.class_of_cluster[static_cast<std::size_t>(c)]);
  return labels;
}

double pseudo_balanced_accuracy(const PseudoLabeling& pseudo, const Scenario& s,
                                const PredictionSet& preds) {
  return balanced_accuracy_aligned(scenario_labels(pseudo, s), align(pseudo, preds),
                                   pseudo.n_clusters);
}

double pseudo_auc(const PseudoLabeling& pseudo, const Scenario& s, const PredictionSet& preds) {
  if (pseudo.n_clusters != 2) {
    throw Error(ErrorCode::kNotBinary,
                "pseudo AUC is defined for two classes, got " + std::to_string(pseudo.n_clusters));
  }
  return auc_aligned(scenario_labels(pseudo, s), align(pseudo, preds), pseudo.n_clusters);
}

std::string_view pseudo_metric_name(PseudoMetric metric) {
  return metric == PseudoMetric::kBalancedAccuracy ? "balanced_accuracy" : "auc";
}

std::optional<PseudoMetric> parse_pseudo_metric(std::string_view name) {
  if (name == "balanced_accuracy") return PseudoMetric::kBalancedAccuracy;
  if (name == "auc") return PseudoMetric::kAuc;
  return std::nullopt;
}

std::vector<double> PseudoMetricTable::adopted_scores() const {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto& row : scores) out.push_back(row[adopted_scenario]);
  return out;
}

const PseudoMetricTable* PseudoScoreTable::find(PseudoMetric metric) const {
  for (const auto& t : metrics) {
    if (t.metric == metric) return &t;
  }
  return nullptr;
}

PseudoScoreTable evaluate_checkpoints(const std::vector<CheckpointPredictions>& checkpoints,
                                      const PseudoLabeling& pseudo,
                                      const std::vector<PseudoMetric>& metrics) {
  if (checkpoints.empty()) throw Error(ErrorCode::kEmptyInput, "no checkpoints to evaluate");
  check_metrics(metrics, pseudo.n_clusters);

  PseudoScoreTable table;
  table.scenarios = enumerate_scenarios(pseudo.n_clusters);
  std::vector<std::vector<int>> truths;
  truths.reserve(table.scenarios.size());
  for (const auto& s : table.scenarios) truths.push_back(scenario_labels(pseudo, s));

  for (auto m : metrics) {
    PseudoMetricTable t;
    t.metric = m;
    table.metrics.push_back(std::move(t));
  }
  for (const auto& cp : checkpoints) {
    if (!table.iterations.empty() && cp.iteration <= table.iterations.back()) {
      throw Error(ErrorCode::kUnsortedIterations,
                  "iteration " + std::to_string(cp.iteration) + " follows " +
                      std::to_string(table.iterations.back()));
    }
    table.iterations.push_back(cp.iteration);
    try {
      const AlignedPredictions aligned = align(pseudo, cp.predictions);
      for (auto& mt : table.metrics) {
        std::vector<double> row;
        row.reserve(truths.size());
        for (const auto& truth : truths) {
          row.push_back(score_one(mt.metric, truth, aligned, pseudo.n_clusters));
        }
        mt.scores.push_back(std::move(row));
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "checkpoint " + std::to_string(cp.iteration));
    }
  }
  for (auto& mt : table.metrics) finalize(mt, table.iterations);
  return table;
}

PseudoScoreTable evaluate_checkpoints(const CheckpointManifest& manifest,
                                      const PseudoLabeling& pseudo,
                                      const std::vector<PseudoMetric>& metrics) {
  validate_manifest(manifest);
  check_metrics(metrics, pseudo.n_clusters);
  std::vector<CheckpointPredictions> loaded;
  loaded.reserve(manifest.checkpoints.size());
  for (const auto& record : manifest.checkpoints) {
    try {
      loaded.push_back(CheckpointPredictions{record.iteration,
                                             load_predictions(record.prediction_path)});
    } catch (const Error& e) {
      rethrow_with_context(e, "checkpoint " + std::to_string(record.iteration));
    }
  }
  return evaluate_checkpoints(loaded, pseudo, metrics);
}

}  // namespace dips
