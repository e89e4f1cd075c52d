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
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dips/error.h"
#include "support/synthetic.h"

namespace dips {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

bool has_warning(const EvaluationReport& r, const std::string& code) {
  return std::any_of(r.warnings.begin(), r.warnings.end(),
                     [&](const Warning& w) { return w.code == code; });
}

const RankingCurve* find_curve(const EvaluationReport& r, const std::string& true_metric,
                               const std::string& metric) {
  for (const auto& c : r.curves) {
    if (c.true_metric == true_metric && c.metric == metric) return &c;
  }
  return nullptr;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EvaluationInputs suite_inputs(const testing::SyntheticSuite& s, bool with_truth) {
  EvaluationInputs in{2, s.target, std::nullopt, s.checkpoints, std::nullopt, std::nullopt,
                      "test"};
  if (with_truth) in.true_labels = s.truth;
  return in;
}

testing::SuiteConfig small_suite() {
  testing::SuiteConfig cfg;
  cfg.n0 = 90;
  cfg.n1 = 70;
  cfg.dim = 6;
  cfg.separation = 3.0;
  cfg.checkpoints = 6;
  return cfg;
}

ReportOptions fast_options() {
  ReportOptions o;
  o.kid_subsets = 5;
  return o;
}

TEST(RankCheckpointsTest, OrdersBestFirst) {
  const std::vector<std::int64_t> it{10000, 20000, 30000};
  const std::vector<double> s{0.2, 0.9, 0.5};
  const std::vector<double> t{0.1, 0.2, 0.3};
  const RankingCurve c = rank_checkpoints("m", it, s, Orientation::kHigherBetter, t);
  ASSERT_EQ(c.entries.size(), 3u);
  EXPECT_EQ(c.entries[0].iteration, 20000);
  EXPECT_EQ(c.entries[1].iteration, 30000);
  EXPECT_EQ(c.entries[2].iteration, 10000);
  EXPECT_EQ(c.entries[2].rank, 3);
  EXPECT_EQ(c.entries[0].true_value, 0.2);
  const RankingCurve low = rank_checkpoints("m", it, s, Orientation::kLowerBetter, t);
  EXPECT_EQ(low.entries[0].iteration, 10000);
}

TEST(RankCheckpointsTest, TiesAndErrors) {
  const std::vector<std::int64_t> it{10000, 20000};
  const std::vector<double> s{0.5, 0.5};
  const std::vector<double> t{0.0, 1.0};
  const RankingCurve c = rank_checkpoints("m", it, s, Orientation::kHigherBetter, t);
  EXPECT_EQ(c.entries[0].iteration, 10000);
  try {
    rank_checkpoints("m", it, s, Orientation::kHigherBetter, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingTrueLabels);
  }
}

TEST(RankCheckpointsTest, SelfRankingIsNonIncreasing) {
  Rng rng(1);
  std::uniform_int_distribution<int> lv(0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial) % 30;
    std::vector<std::int64_t> it(m);
    std::vector<double> truth(m);
    for (std::size_t i = 0; i < m; ++i) {
      it[i] = static_cast<std::int64_t>(i + 1) * 10;
      truth[i] = lv(rng) / 6.0;
    }
    const RankingCurve c = rank_checkpoints("true", it, truth, Orientation::kHigherBetter, truth);
    for (std::size_t i = 1; i < m; ++i) {
      EXPECT_LE(c.entries[i].true_value, c.entries[i - 1].true_value);
    }
  }
}

TEST(CorrelateTest, Behaviour) {
  const std::vector<double> t{0.9, 0.8, 0.6, 0.7};
  const CorrelationPanel same = correlate("p", t, t);
  EXPECT_EQ(*same.pearson, 1.0);
  EXPECT_EQ(*same.spearman, 1.0);
  EXPECT_EQ(*same.kendall, 1.0);
  EXPECT_EQ(*same.r_squared, 1.0);
  const std::vector<double> fid_like{10, 20, 40, 30};
  EXPECT_LT(*correlate("fid", fid_like, t).pearson, 0.0);
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  const CorrelationPanel c = correlate("p", t, flat);
  EXPECT_FALSE(c.pearson.has_value());
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_EQ(c.warnings[0].code, "ZeroVariance");
  EXPECT_EQ(c.true_values, flat);
  EXPECT_EQ(c.metric_values, t);
}

TEST(BuildReportTest, WithoutLabelsOnlyPseudoAndBaselines) {
  const auto suite = testing::make_suite(small_suite());
  const EvaluationReport r = build_report(suite_inputs(suite, false), fast_options());
  EXPECT_TRUE(r.curves.empty());
  EXPECT_TRUE(r.panels.empty());
  EXPECT_TRUE(r.picked.empty());
  EXPECT_TRUE(r.true_metrics.empty());
  EXPECT_EQ(r.pseudo.metrics.size(), 2u);
  EXPECT_EQ(r.baselines.size(), 6u);
  EXPECT_EQ(r.baselines[0].scores.size(), 5u);
  EXPECT_EQ(r.pseudo_labels.sample_count, 160u);
}

TEST(BuildReportTest, ValidationModeContents) {
  const auto suite = testing::make_suite(small_suite());
  const EvaluationReport r = build_report(suite_inputs(suite, true), fast_options());
  ASSERT_EQ(r.true_metrics.size(), 6u);
  EXPECT_TRUE(r.true_metrics[0].auc.has_value());
  // 2 true metrics x (self + 2 pseudo + 5 baselines).
  EXPECT_EQ(r.curves.size(), 16u);
  EXPECT_EQ(r.panels.size(), 14u);
  EXPECT_EQ(r.picked.size(), 9u);
  for (const auto& p : r.picked) {
    const bool is_true = p.metric.rfind("true_", 0) == 0;
    EXPECT_EQ(p.balanced_accuracy_place.has_value(), !is_true) << p.metric;
  }
  const RankingCurve* self = find_curve(r, "true_balanced_accuracy", "true_balanced_accuracy");
  ASSERT_NE(self, nullptr);
  for (std::size_t i = 1; i < self->entries.size(); ++i) {
    EXPECT_LE(self->entries[i].true_value, self->entries[i - 1].true_value);
  }
  // Best place exists among the competitors.
  EXPECT_TRUE(std::any_of(r.picked.begin(), r.picked.end(), [](const PickedModelRow& p) {
    return p.balanced_accuracy_place == 1;
  }));
}

TEST(BuildReportTest, DeterministicBytes) {
  const auto suite = testing::make_suite(small_suite());
  const auto in = suite_inputs(suite, true);
  EXPECT_EQ(report_to_json(build_report(in, fast_options())),
            report_to_json(build_report(in, fast_options())));
}

TEST(BuildReportTest, WarningsAreRaisedWhenTriggered) {
  testing::SuiteConfig cfg = small_suite();
  cfg.n0 = 12;
  cfg.n1 = 10;
  cfg.dim = 30;  // fewer samples than dimensions
  cfg.separation = 4.0;
  auto suite = testing::make_suite(cfg);
  suite.checkpoints[2].features.reset();
  // Every checkpoint predicts the same thing: constant true metrics.
  for (auto& cp : suite.checkpoints) cp.predictions = suite.checkpoints[0].predictions;
  ReportOptions o = fast_options();
  o.gmm.max_iter = 1;
  o.gmm.tol = 1e-300;
  o.pca = PcaConfig{4, true};
  const EvaluationReport r = build_report(suite_inputs(suite, true), o);
  EXPECT_TRUE(has_warning(r, "SmallSampleFid"));
  EXPECT_TRUE(has_warning(r, "MissingFeatures"));
  EXPECT_TRUE(has_warning(r, "ZeroVariance"));
  EXPECT_TRUE(has_warning(r, "GmmNotConverged"));
  // Checkpoint without features keeps only the prediction-based baseline.
  EXPECT_EQ(r.baselines[2].scores.size(), 1u);
}

TEST(BuildReportTest, ThirtyCheckpointManifest) {
  testing::SuiteConfig cfg = small_suite();
  cfg.checkpoints = 30;
  const auto suite = testing::make_suite(cfg);
  const fs::path dir = testing::fresh_dir("report30");
  const fs::path manifest_path = testing::write_suite(suite, dir);
  const CheckpointManifest m = load_manifest(manifest_path);
  ASSERT_EQ(m.checkpoints.size(), 30u);
  EXPECT_EQ(m.checkpoints.back().iteration, 300000);
  const EvaluationReport r = build_report(m, fast_options(), dir / "labels.csv");
  EXPECT_EQ(r.iterations.size(), 30u);
  EXPECT_EQ(r.baselines.size(), 30u);
  EXPECT_EQ(r.true_metrics.size(), 30u);
  EXPECT_EQ(r.pseudo.metrics[0].scores.size(), 30u);
  for (const auto& c : r.curves) EXPECT_EQ(c.entries.size(), 30u);
  EXPECT_EQ(r.manifest_digest, manifest_digest(m));

  save_report_tables(r, dir / "out");
  EXPECT_TRUE(fs::exists(dir / "out" / "pseudo_scores.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "baselines.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "picked.csv"));
  const std::string curve =
      read_text(dir / "out" / "curves" / "true_balanced_accuracy__fid.csv");
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "rank,metric_value,true_value");
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 31);
}

TEST(BuildReportTest, ErrorsAreTaggedWithStage) {
  auto suite = testing::make_suite(small_suite());
  Eigen::MatrixXd p = suite.checkpoints[3].predictions.probs();
  std::vector<std::string> ids = suite.checkpoints[3].predictions.ids();
  ids[0] = "stranger";
  suite.checkpoints[3].predictions = PredictionSet(ids, p);
  try {
    build_report(suite_inputs(suite, false), fast_options());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIdMismatch);
    EXPECT_NE(std::string(e.what()).find("checkpoint 40000"), std::string::npos) << e.what();
  }
}

// Hand-rolled generator of arbitrary valid reports for the round trip.
EvaluationReport random_report(Rng& rng) {
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> small(0, 4);
  auto maybe = [&](double v) { return coin(rng) ? std::optional<double>(v) : std::nullopt; };
  EvaluationReport r;
  r.manifest_digest = "d" + std::to_string(small(rng));
  r.class_count = 2 + small(rng) % 2;
  const int m = 1 + small(rng);
  for (int i = 0; i < m; ++i) r.iterations.push_back(1000 * (i + 1));
  r.pseudo_labels = {static_cast<std::size_t>(small(rng)), {3, 4}, coin(rng) == 1,
                     maybe(u(rng))};
  if (coin(rng)) r.pseudo_labels.converged.reset();
  r.pseudo.iterations = r.iterations;
  r.pseudo.scenarios = enumerate_scenarios(r.class_count);
  for (auto metric : {PseudoMetric::kBalancedAccuracy, PseudoMetric::kAuc}) {
    PseudoMetricTable t;
    t.metric = metric;
    for (int i = 0; i < m; ++i) {
      std::vector<double> row;
      for (std::size_t s = 0; s < r.pseudo.scenarios.size(); ++s) row.push_back(u(rng));
      t.scores.push_back(row);
    }
    t.scenario_means.assign(r.pseudo.scenarios.size(), u(rng));
    t.adopted_scenario = static_cast<std::size_t>(small(rng));
    t.best_checkpoint = static_cast<std::size_t>(small(rng));
    t.best_iteration = 1000;
    r.pseudo.metrics.push_back(t);
  }
  for (auto it : r.iterations) {
    BaselineRow row{it, {}};
    for (auto metric : {BaselineMetric::kFid, BaselineMetric::kInceptionScore}) {
      BaselineScore s{metric, u(rng), orientation_of(metric), 5, 7, {}};
      if (coin(rng)) s.warnings.push_back("SmallSampleFid: x");
      row.scores.push_back(s);
    }
    r.baselines.push_back(row);
    r.true_metrics.push_back({it, u(rng), maybe(u(rng))});
  }
  RankingCurve c{"fid", "true_auc", Orientation::kLowerBetter, {}};
  for (int i = 0; i < m; ++i) c.entries.push_back({i + 1, r.iterations[i], u(rng), u(rng)});
  r.curves.push_back(c);
  CorrelationPanel p;
  p.metric = "kid";
  p.true_metric = "true_balanced_accuracy";
  p.metric_values = {u(rng), u(rng)};
  p.true_values = {u(rng), u(rng)};
  p.pearson = maybe(u(rng));
  p.kendall = maybe(u(rng));
  if (coin(rng)) p.warnings.push_back({"ZeroVariance", "flat"});
  r.panels.push_back(p);
  r.picked.push_back({"is", 2000, u(rng), maybe(u(rng)),
                      coin(rng) ? std::optional<int>(small(rng)) : std::nullopt, std::nullopt});
  if (coin(rng)) r.warnings.push_back({"MissingFeatures", "x \"quoted\" \n"});
  return r;
}

TEST(ReportIoTest, SaveLoadIsIdentity) {
  Rng rng(2);
  const fs::path dir = testing::fresh_dir("report_io");
  for (int trial = 0; trial < 50; ++trial) {
    const EvaluationReport r = random_report(rng);
    save_report(r, dir / "r.json");
    EXPECT_EQ(load_report(dir / "r.json"), r) << "trial " << trial;
  }
  const auto suite = testing::make_suite(small_suite());
  const EvaluationReport real = build_report(suite_inputs(suite, true), fast_options());
  save_report(real, dir / "real.json");
  EXPECT_EQ(load_report(dir / "real.json"), real);
  const std::string text = report_to_json(real);
  EXPECT_EQ(text.find("\"schema_version\""), 4u);
}

TEST(ReportIoTest, RejectsUnknownSchema) {
  EXPECT_THROW(report_from_json(R"({"schema_version": 99})"), Error);
  EXPECT_THROW(report_from_json("not json"), Error);
}

}  // namespace
}  // namespace dips
