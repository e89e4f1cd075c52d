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

#include "dips/report.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "dips/error.h"
#include "dips/stats.h"

namespace dips {
namespace {

constexpr std::size_t kDefaultKidSubsetSize = 1000;

std::string pseudo_report_name(PseudoMetric m) {
  return "pseudo_" + std::string(pseudo_metric_name(m));
}

// A ranked metric: one value per checkpoint.
struct Ranker {
  std::string name;
  Orientation orientation;
  std::vector<double> values;
  bool is_true_metric = false;
};

struct TrueColumn {
  std::string name;
  std::vector<double> values;
};

std::vector<std::size_t> best_first_order(std::span<const std::int64_t> iterations,
                                          std::span<const double> scores,
                                          Orientation orientation) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return orientation == Orientation::kHigherBetter ? scores[a] > scores[b]
                                                       : scores[a] < scores[b];
    }
    return iterations[a] < iterations[b];
  });
  return order;
}

// Dense places (1 = best) of `values` in descending order.
std::vector<int> dense_places(const std::vector<double>& values) {
  std::set<double, std::greater<>> distinct(values.begin(), values.end());
  std::vector<int> places;
  places.reserve(values.size());
  for (double v : values) {
    places.push_back(static_cast<int>(std::distance(distinct.begin(), distinct.find(v))) + 1);
  }
  return places;
}

std::vector<PseudoMetric> resolve_pseudo_metrics(const ReportOptions& options, int class_count) {
  if (!options.pseudo_metrics.empty()) return options.pseudo_metrics;
  if (class_count == 2) return {PseudoMetric::kBalancedAccuracy, PseudoMetric::kAuc};
  return {PseudoMetric::kBalancedAccuracy};
}

std::vector<BaselineMetric> resolve_baseline_metrics(const ReportOptions& options) {
  if (options.skip_baselines) return {};
  if (!options.baseline_metrics.empty()) return options.baseline_metrics;
  return {BaselineMetric::kFid, BaselineMetric::kKid, BaselineMetric::kInceptionScore,
          BaselineMetric::kMmdLinear, BaselineMetric::kMmdGaussian};
}

bool needs_features(BaselineMetric m) { return m != BaselineMetric::kInceptionScore; }

std::vector<std::size_t> cluster_sizes(const PseudoLabeling& pseudo) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(pseudo.n_clusters), 0);
  for (int c : pseudo.cluster_of) ++sizes[static_cast<std::size_t>(c)];
  return sizes;
}

Eigen::MatrixXd sorted_rows(const FeatureMatrix& f) {
  std::vector<std::size_t> order(f.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return f.ids()[a] < f.ids()[b]; });
  Eigen::MatrixXd out(f.values().rows(), f.values().cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = f.values().row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

std::vector<BaselineRow> compute_baselines(const EvaluationInputs& inputs,
                                           const std::vector<BaselineMetric>& metrics,
                                           const ReportOptions& options,
                                           std::vector<Warning>& warnings) {
  std::vector<BaselineRow> rows;
  if (metrics.empty()) return rows;
  const bool any_feature_metric = std::any_of(metrics.begin(), metrics.end(), needs_features);
  const FeatureMatrix& reference =
      inputs.reference_features ? *inputs.reference_features : inputs.target_features;
  const Eigen::MatrixXd real = sorted_rows(reference);

  std::optional<FidReference> fid_ref;
  if (std::find(metrics.begin(), metrics.end(), BaselineMetric::kFid) != metrics.end()) {
    try {
      fid_ref = make_fid_reference(real);
    } catch (const Error& e) {
      rethrow_with_context(e, "baselines: reference features");
    }
  }

  std::vector<std::int64_t> missing_features;
  std::size_t small_sample_fid = 0;
  std::string small_sample_message;
  for (const auto& cp : inputs.checkpoints) {
    BaselineRow row;
    row.iteration = cp.iteration;
    try {
      std::optional<Eigen::MatrixXd> fake;
      if (cp.features) {
        fake = sorted_rows(*cp.features);
      } else if (any_feature_metric) {
        missing_features.push_back(cp.iteration);
      }
      for (auto metric : metrics) {
        if (metric == BaselineMetric::kInceptionScore) {
          row.scores.push_back(inception_score(cp.predictions, options.is_splits));
          continue;
        }
        if (!fake) continue;
        switch (metric) {
          case BaselineMetric::kFid: {
            BaselineScore s = fid(*fid_ref, *fake);
            if (!s.warnings.empty()) {
              ++small_sample_fid;
              small_sample_message = s.warnings.front();
            }
            row.scores.push_back(std::move(s));
            break;
          }
          case BaselineMetric::kKid: {
            const std::size_t subset =
                options.kid_subset_size
                    ? *options.kid_subset_size
                    : std::min<std::size_t>({kDefaultKidSubsetSize,
                                             static_cast<std::size_t>(real.rows()),
                                             static_cast<std::size_t>(fake->rows())});
            row.scores.push_back(kid(real, *fake, subset, options.kid_subsets, options.seed));
            break;
          }
          case BaselineMetric::kMmdLinear:
          case BaselineMetric::kMmdGaussian: {
            Kernel k = LinearKernel{};
            if (metric == BaselineMetric::kMmdGaussian) {
              k = GaussianKernel{options.mmd_bandwidth
                                     ? *options.mmd_bandwidth
                                     : median_heuristic_bandwidth(real, *fake, options.seed)};
            }
            BaselineScore s;
            s.metric = metric;
            s.orientation = Orientation::kLowerBetter;
            s.m = static_cast<std::size_t>(real.rows());
            s.n = static_cast<std::size_t>(fake->rows());
            s.value = mmd_unbiased_value(real, *fake, k);
            row.scores.push_back(std::move(s));
            break;
          }
          case BaselineMetric::kInceptionScore:
            break;
        }
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "baselines: checkpoint " + std::to_string(cp.iteration));
    }
    rows.push_back(std::move(row));
  }

  if (!missing_features.empty()) {
    std::string list;
    for (auto it : missing_features) list += (list.empty() ? "" : ", ") + std::to_string(it);
    warnings.push_back({"MissingFeatures",
                        "feature-based baselines skipped for checkpoints without features: " +
                            list});
  }
  if (small_sample_fid > 0) {
    warnings.push_back({"SmallSampleFid", std::to_string(small_sample_fid) +
                                              " checkpoint(s): " + small_sample_message});
  }
  return rows;
}

std::vector<TrueMetricsRow> compute_true_metrics(const EvaluationInputs& inputs,
                                                 std::vector<Warning>& warnings) {
  std::vector<TrueMetricsRow> rows;
  const LabelFile& truth = *inputs.true_labels;
  const auto index = index_ids(truth.ids);
  bool auc_unavailable = false;
  for (const auto& cp : inputs.checkpoints) {
    TrueMetricsRow row;
    row.iteration = cp.iteration;
    try {
      if (cp.predictions.class_count() != inputs.class_count) {
        throw Error(ErrorCode::kDimMismatch,
                    "predictions have " + std::to_string(cp.predictions.class_count()) +
                        " classes, expected " + std::to_string(inputs.class_count));
      }
      const std::vector<int> hard = cp.predictions.hard_labels();
      std::vector<int> y_true;
      std::vector<int> is_positive;
      std::vector<double> scores;
      y_true.reserve(hard.size());
      for (std::size_t i = 0; i < cp.predictions.rows(); ++i) {
        const auto it = index.find(cp.predictions.ids()[i]);
        if (it == index.end()) {
          throw Error(ErrorCode::kIdMismatch,
                      "no true label for id '" + cp.predictions.ids()[i] + "'");
        }
        const int label = truth.labels[it->second];
        if (label >= inputs.class_count) {
          throw Error(ErrorCode::kLabelOutOfRange, "true label " + std::to_string(label));
        }
        y_true.push_back(label);
        if (inputs.class_count == 2) {
          is_positive.push_back(label == 1 ? 1 : 0);
          scores.push_back(cp.predictions.probs()(static_cast<Eigen::Index>(i), 1));
        }
      }
      row.balanced_accuracy = balanced_accuracy(confusion(y_true, hard, inputs.class_count));
      if (inputs.class_count == 2) {
        const auto positives = std::count(is_positive.begin(), is_positive.end(), 1);
        if (positives > 0 && positives < static_cast<std::ptrdiff_t>(is_positive.size())) {
          row.auc = roc_auc(scores, is_positive);
        } else {
          auc_unavailable = true;
        }
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "true metrics: checkpoint " + std::to_string(cp.iteration));
    }
    rows.push_back(row);
  }
  if (auc_unavailable) {
    warnings.push_back({"SingleClassPresent",
                        "true labels contain one class only; true AUC not computed"});
    for (auto& r : rows) r.auc.reset();
  }
  return rows;
}

}  // namespace

RankingCurve rank_checkpoints(std::string metric, std::span<const std::int64_t> iterations,
                              std::span<const double> scores, Orientation orientation,
                              std::span<const double> true_values, std::string true_metric) {
  if (true_values.empty()) {
    throw Error(ErrorCode::kMissingTrueLabels,
                "ranking '" + metric + "' needs true metric values per checkpoint");
  }
  if (iterations.size() != scores.size() || scores.size() != true_values.size()) {
    throw Error(ErrorCode::kLengthMismatch, "iterations, scores and true values differ in length");
  }
  if (scores.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "ranking needs at least 2 checkpoints");
  }
  RankingCurve curve;
  curve.metric = std::move(metric);
  curve.true_metric = std::move(true_metric);
  curve.orientation = orientation;
  const auto order = best_first_order(iterations, scores, orientation);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    curve.entries.push_back(
        RankingEntry{static_cast<int>(r + 1), iterations[i], scores[i], true_values[i]});
  }
  return curve;
}

CorrelationPanel correlate(std::string metric, std::span<const double> metric_values,
                           std::span<const double> true_values, std::string true_metric) {
  CorrelationPanel panel;
  panel.metric = std::move(metric);
  panel.true_metric = std::move(true_metric);
  panel.metric_values.assign(metric_values.begin(), metric_values.end());
  panel.true_values.assign(true_values.begin(), true_values.end());
  try {
    panel.r_squared = r_squared(metric_values, true_values);
    panel.pearson = pearson(metric_values, true_values);
    panel.spearman = spearman(metric_values, true_values);
    panel.kendall = kendall_tau_b(metric_values, true_values);
  } catch (const Error& e) {
    panel.r_squared.reset();
    panel.pearson.reset();
    panel.spearman.reset();
    panel.kendall.reset();
    panel.warnings.push_back({std::string(error_code_name(e.code())),
                              panel.metric + " vs " + panel.true_metric + ": " + e.what()});
  }
  return panel;
}

std::string manifest_digest(const CheckpointManifest& manifest) {
  const std::string canonical = manifest_to_json(manifest);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

EvaluationInputs load_inputs(const CheckpointManifest& manifest,
                             const std::optional<std::filesystem::path>& true_labels_path,
                             const std::optional<std::filesystem::path>& pseudo_labels_path) {
  validate_manifest(manifest);
  auto tagged = [](const std::string& stage, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      rethrow_with_context(e, stage);
    }
  };
  EvaluationInputs inputs{
      .class_count = manifest.class_count,
      .target_features = tagged("load target features",
                                [&] { return load_features(manifest.target_feature_path); }),
      .reference_features = std::nullopt,
      .checkpoints = {},
      .pseudo_labels = std::nullopt,
      .true_labels = std::nullopt,
      .digest = manifest_digest(manifest),
  };
  if (manifest.reference_feature_path) {
    inputs.reference_features = tagged("load reference features", [&] {
      return load_features(*manifest.reference_feature_path);
    });
  }
  for (const auto& record : manifest.checkpoints) {
    const std::string stage = "load checkpoint " + std::to_string(record.iteration);
    CheckpointData data{record.iteration,
                        tagged(stage, [&] { return load_predictions(record.prediction_path); }),
                        std::nullopt};
    if (record.feature_path) {
      data.features = tagged(stage, [&] { return load_features(*record.feature_path); });
    }
    inputs.checkpoints.push_back(std::move(data));
  }
  if (true_labels_path) {
    inputs.true_labels = tagged("load true labels", [&] {
      return load_labels(*true_labels_path, manifest.class_count);
    });
  }
  if (pseudo_labels_path) {
    inputs.pseudo_labels = tagged("load pseudo labels", [&] {
      return from_label_file(load_labels(*pseudo_labels_path, manifest.class_count),
                             manifest.class_count);
    });
  }
  return inputs;
}

EvaluationReport build_report(const EvaluationInputs& inputs, const ReportOptions& options) {
  if (inputs.checkpoints.empty()) throw Error(ErrorCode::kEmptyInput, "no checkpoints");
  EvaluationReport report;
  report.manifest_digest = inputs.digest;
  report.class_count = inputs.class_count;
  for (const auto& cp : inputs.checkpoints) {
    if (!report.iterations.empty() && cp.iteration <= report.iterations.back()) {
      throw Error(ErrorCode::kUnsortedIterations,
                  "iteration " + std::to_string(cp.iteration) + " follows " +
                      std::to_string(report.iterations.back()));
    }
    report.iterations.push_back(cp.iteration);
  }

  // Pseudo labels.
  PseudoLabeling pseudo;
  if (inputs.pseudo_labels) {
    pseudo = *inputs.pseudo_labels;
    if (pseudo.n_clusters != inputs.class_count) {
      throw Error(ErrorCode::kDimMismatch, "pseudo labeling has " +
                                               std::to_string(pseudo.n_clusters) +
                                               " clusters, expected " +
                                               std::to_string(inputs.class_count));
    }
  } else {
    GmmConfig cfg = options.gmm;
    cfg.seed = options.seed;
    try {
      pseudo = generate_pseudo_labels(inputs.target_features, inputs.class_count, cfg,
                                      options.pca);
    } catch (const Error& e) {
      rethrow_with_context(e, "cluster");
    }
    if (pseudo.converged && !*pseudo.converged) {
      report.warnings.push_back(
          {"GmmNotConverged", "EM stopped after " + std::to_string(cfg.max_iter) +
                                  " iterations without meeting tol " + std::to_string(cfg.tol)});
    }
  }
  report.pseudo_labels = PseudoLabelSummary{pseudo.ids.size(), cluster_sizes(pseudo),
                                            pseudo.converged, pseudo.final_log_likelihood};

  // Pseudo scores.
  const auto pseudo_metrics = resolve_pseudo_metrics(options, inputs.class_count);
  {
    std::vector<CheckpointPredictions> preds;
    preds.reserve(inputs.checkpoints.size());
    for (const auto& cp : inputs.checkpoints) preds.push_back({cp.iteration, cp.predictions});
    try {
      report.pseudo = evaluate_checkpoints(preds, pseudo, pseudo_metrics);
    } catch (const Error& e) {
      rethrow_with_context(e, "evaluate");
    }
  }

  // Baselines.
  const auto baseline_metrics = resolve_baseline_metrics(options);
  report.baselines = compute_baselines(inputs, baseline_metrics, options, report.warnings);

  if (!inputs.true_labels) return report;

  // Validation mode.
  report.true_metrics = compute_true_metrics(inputs, report.warnings);

  std::vector<TrueColumn> truths;
  {
    TrueColumn ba{"true_balanced_accuracy", {}};
    TrueColumn auc{"true_auc", {}};
    for (const auto& row : report.true_metrics) {
      ba.values.push_back(row.balanced_accuracy);
      if (row.auc) auc.values.push_back(*row.auc);
    }
    truths.push_back(std::move(ba));
    if (auc.values.size() == report.true_metrics.size()) truths.push_back(std::move(auc));
  }

  std::vector<Ranker> rankers;
  for (const auto& t : truths) {
    rankers.push_back({t.name, Orientation::kHigherBetter, t.values, true});
  }
  for (const auto& mt : report.pseudo.metrics) {
    rankers.push_back({pseudo_report_name(mt.metric), Orientation::kHigherBetter,
                       mt.adopted_scores(), false});
  }
  for (auto metric : baseline_metrics) {
    Ranker r{std::string(metric_name(metric)), orientation_of(metric), {}, false};
    for (const auto& row : report.baselines) {
      for (const auto& s : row.scores) {
        if (s.metric == metric) r.values.push_back(s.value);
      }
    }
    if (r.values.size() == report.iterations.size()) rankers.push_back(std::move(r));
  }

  if (report.iterations.size() < 2) {
    report.warnings.push_back({"TooFewCheckpoints", "ranking needs at least 2 checkpoints"});
  } else {
    for (const auto& t : truths) {
      for (const auto& r : rankers) {
        if (r.is_true_metric && r.name != t.name) continue;
        report.curves.push_back(rank_checkpoints(r.name, report.iterations, r.values,
                                                 r.orientation, t.values, t.name));
        if (r.is_true_metric) continue;
        CorrelationPanel panel = correlate(r.name, r.values, t.values, t.name);
        for (const auto& w : panel.warnings) report.warnings.push_back(w);
        report.panels.push_back(std::move(panel));
      }
    }
  }

  // Picked-model comparison.
  std::map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < report.iterations.size(); ++i) position[report.iterations[i]] = i;
  for (const auto& r : rankers) {
    const auto order = best_first_order(report.iterations, r.values, r.orientation);
    const std::size_t pick = order.front();
    PickedModelRow row;
    row.metric = r.name;
    row.iteration = report.iterations[pick];
    row.true_balanced_accuracy = report.true_metrics[pick].balanced_accuracy;
    row.true_auc = report.true_metrics[pick].auc;
    report.picked.push_back(std::move(row));
  }
  std::vector<std::size_t> competing;
  for (std::size_t i = 0; i < rankers.size(); ++i) {
    if (!rankers[i].is_true_metric) competing.push_back(i);
  }
  if (!competing.empty()) {
    std::vector<double> ba;
    for (auto i : competing) ba.push_back(report.picked[i].true_balanced_accuracy);
    const auto ba_places = dense_places(ba);
    const bool have_auc = report.picked[competing.front()].true_auc.has_value();
    std::vector<double> auc;
    if (have_auc) {
      for (auto i : competing) auc.push_back(*report.picked[i].true_auc);
    }
    const auto auc_places = dense_places(auc);
    for (std::size_t j = 0; j < competing.size(); ++j) {
      report.picked[competing[j]].balanced_accuracy_place = ba_places[j];
      if (have_auc) report.picked[competing[j]].auc_place = auc_places[j];
    }
  }
  return report;
}

EvaluationReport build_report(const CheckpointManifest& manifest, const ReportOptions& options,
                              const std::optional<std::filesystem::path>& true_labels_path,
                              const std::optional<std::filesystem::path>& pseudo_labels_path) {
  return build_report(load_inputs(manifest, true_labels_path, pseudo_labels_path), options);
}

}  // namespace dips
