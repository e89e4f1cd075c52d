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

#include "dips/baselines.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dips/data_io.h"
#include "dips/error.h"
#include "support/oracles.h"
#include "support/synthetic.h"

namespace dips {
namespace {

using testing::Rng;

template <typename Fn>
ErrorCode code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Rows (a, b), (a, -b) stacked: mean a, unbiased variance per column b^2
// when there are two rows per sign.
Eigen::MatrixXd exact_summary_rows(const Eigen::VectorXd& mean, double sd) {
  const Eigen::Index d = mean.size();
  Eigen::MatrixXd x(2 * d, d);
  // +/- sd * sqrt(d) along each axis: mean exact, covariance sd^2 I * 2d/(2d-1).
  // Scale so the unbiased covariance is exactly sd^2 I.
  const double a = sd * std::sqrt((2.0 * d - 1.0) / 2.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    x.row(2 * k) = mean.transpose();
    x.row(2 * k + 1) = mean.transpose();
    x(2 * k, k) += a;
    x(2 * k + 1, k) -= a;
  }
  return x;
}

TEST(FidTest, SelfDistanceIsZero) {
  Rng rng(1);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 200, 8);
  EXPECT_NEAR(fid(x, x).value, 0.0, 1e-6);
}

TEST(FidTest, OneDimensionalClosedForm) {
  Eigen::MatrixXd a(2, 1), b(2, 1);
  const double s = std::sqrt(0.5);  // two points at +/- s: unbiased variance 1
  a << -s, s;
  b << 2 - s, 2 + s;
  const GaussianSummary sa = gaussian_summary(a);
  const GaussianSummary sb = gaussian_summary(b);
  EXPECT_NEAR(sa.cov(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(fid_from_summaries(sa, sb), 4.0, 1e-9);
  EXPECT_NEAR(fid(a, b).value, 4.0, 1e-9);
}

TEST(FidTest, TwoDimensionalClosedForm) {
  GaussianSummary a{Eigen::Vector2d(0, 0), Eigen::MatrixXd::Identity(2, 2), 10};
  GaussianSummary b{Eigen::Vector2d(1, 1), 4 * Eigen::MatrixXd::Identity(2, 2), 10};
  EXPECT_NEAR(fid_from_summaries(a, b), 4.0, 1e-9);
  // The same from sample rows engineered to have these summaries.
  const Eigen::MatrixXd xa = exact_summary_rows(Eigen::Vector2d(0, 0), 1.0);
  const Eigen::MatrixXd xb = exact_summary_rows(Eigen::Vector2d(1, 1), 2.0);
  EXPECT_LT((gaussian_summary(xb).cov - 4 * Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
  EXPECT_NEAR(fid(xa, xb).value, 4.0, 1e-9);
}

TEST(FidTest, SymmetricAndWarnsOnSmallSamples) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = testing::normal_matrix(rng, 40, 6);
    Eigen::MatrixXd y = testing::normal_matrix(rng, 50, 6, 1.5);
    y.array() += 0.3;
    EXPECT_NEAR(fid(x, y).value, fid(y, x).value, 1e-6);
  }
  const Eigen::MatrixXd small = testing::normal_matrix(rng, 4, 6);
  const BaselineScore s = fid(small, small);
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("SmallSampleFid"), std::string::npos);
  EXPECT_EQ(code_of([&] { fid(small, Eigen::MatrixXd(Eigen::MatrixXd::Zero(4, 5))); }),
            ErrorCode::kDimMismatch);
}

TEST(FidTest, CachedReferenceMatches) {
  Rng rng(3);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 30, 5);
  const Eigen::MatrixXd y = testing::normal_matrix(rng, 35, 5, 2.0);
  EXPECT_EQ(fid(make_fid_reference(x), y).value, fid(x, y).value);
}

TEST(MmdTest, HandExample) {
  Eigen::MatrixXd x(2, 2), y(2, 2);
  x << 1, 0, -1, 0;
  y << 0, 1, 0, -1;
  EXPECT_EQ(mmd_unbiased_value(x, y, LinearKernel{}), -2.0);
}

TEST(MmdTest, IdenticalPointMassesGiveZero) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 2, 0.4);
  EXPECT_EQ(mmd_unbiased_value(x, x, GaussianKernel{1.0}), 0.0);
}

TEST(MmdTest, MatchesDoubleLoopOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd x = testing::normal_matrix(rng, 64, 4);
    const Eigen::MatrixXd y = testing::normal_matrix(rng, 64, 4, 1.3);
    for (const Kernel& k :
         {Kernel{LinearKernel{}}, Kernel{GaussianKernel{2.0}}, Kernel{kid_kernel(4)}}) {
      EXPECT_NEAR(mmd_unbiased_value(x, y, k), testing::mmd_double_loop(x, y, k), 1e-10);
    }
  }
}

TEST(MmdTest, GrowsWithMeanShift) {
  Rng rng(5);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 100, 1);
  const Eigen::MatrixXd base = testing::normal_matrix(rng, 100, 1);
  double previous = -1e300;
  for (int step = 0; step <= 10; ++step) {
    const Eigen::MatrixXd y = base.array() + 0.3 * step;
    const double v = mmd_unbiased_value(x, y, GaussianKernel{1.0});
    EXPECT_GT(v, previous) << "shift step " << step;
    previous = v;
  }
}

TEST(MmdTest, SymmetricAndErrors) {
  Rng rng(6);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 20, 3);
  const Eigen::MatrixXd y = testing::normal_matrix(rng, 25, 3);
  EXPECT_NEAR(mmd_unbiased_value(x, y, GaussianKernel{1.0}),
              mmd_unbiased_value(y, x, GaussianKernel{1.0}), 1e-12);
  EXPECT_EQ(code_of([&] { mmd_unbiased_value(x.topRows(1), y, LinearKernel{}); }),
            ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([&] { mmd_unbiased_value(x, y.leftCols(2), LinearKernel{}); }),
            ErrorCode::kDimMismatch);
}

TEST(MedianHeuristicTest, MatchesAllPairsMedian) {
  Eigen::MatrixXd x(2, 1), y(2, 1);
  x << 0, 1;
  y << 3, 7;
  // Pooled distances: 1,3,7,2,6,4 -> median of {1,2,3,4,6,7} is 3.5.
  EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(x, y, 0), 3.5);
  EXPECT_EQ(code_of([] {
              median_heuristic_bandwidth(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 2),
                                         0);
            }),
            ErrorCode::kDegenerateInput);
  Rng rng(7);
  const Eigen::MatrixXd a = testing::normal_matrix(rng, 100, 3);
  const Eigen::MatrixXd b = testing::normal_matrix(rng, 100, 3);
  EXPECT_EQ(median_heuristic_bandwidth(a, b, 42), median_heuristic_bandwidth(a, b, 42));
}

TEST(KidTest, FullSubsetEqualsPolynomialMmd) {
  Rng rng(8);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 30, 5);
  const Eigen::MatrixXd y = testing::normal_matrix(rng, 30, 5, 1.2);
  EXPECT_EQ(kid(x, y, 30, 1, 123).value, mmd_unbiased_value(x, y, kid_kernel(5)));
}

TEST(KidTest, DeterministicAndErrors) {
  Rng rng(9);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 50, 4);
  const Eigen::MatrixXd y = testing::normal_matrix(rng, 40, 4);
  EXPECT_EQ(kid(x, y, 20, 10, 5).value, kid(x, y, 20, 10, 5).value);
  EXPECT_EQ(code_of([&] { kid(x, y, 41, 1, 0); }), ErrorCode::kSubsetTooLarge);
}

TEST(KidTest, UnbiasedOnSameDistribution) {
  Rng rng(10);
  const Eigen::MatrixXd pool = testing::normal_matrix(rng, 1000, 3);
  // Disjoint halves of one sample.
  const Eigen::MatrixXd x = pool.topRows(500);
  const Eigen::MatrixXd y = pool.bottomRows(500);
  const std::vector<double> values = kid_subset_values(x, y, 100, 50, 77);
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= values.size() - 1;
  const double stderr_ = std::sqrt(var / values.size());
  EXPECT_LE(std::abs(mean), 3 * stderr_);
}

TEST(InceptionScoreTest, Examples) {
  EXPECT_EQ(inception_score_value(Eigen::MatrixXd::Constant(7, 4, 0.25), 1), 1.0);
  Eigen::MatrixXd half(4, 2);
  half << 1, 0, 0, 1, 1, 0, 0, 1;
  EXPECT_EQ(inception_score_value(half, 1), 2.0);
  Eigen::MatrixXd one(1, 2);
  one << 1, 0;
  EXPECT_EQ(inception_score_value(one, 1), 1.0);
  EXPECT_EQ(code_of([] { inception_score_value(Eigen::MatrixXd(0, 2), 1); }),
            ErrorCode::kEmptyInput);
}

TEST(InceptionScoreTest, OneHotBalancedGivesClassCount) {
  for (int k = 2; k <= 10; ++k) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3 * k, k);
    for (int i = 0; i < 3 * k; ++i) p(i, i % k) = 1.0;
    EXPECT_EQ(inception_score_value(p, 1), static_cast<double>(k)) << "K=" << k;
  }
}

TEST(InceptionScoreTest, WithinRangeOnRandomInputs) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 5;
    const Eigen::MatrixXd p = testing::random_probs(rng, 30, k);
    const double s = inception_score_value(p, 1 + trial % 4);
    EXPECT_GE(s, 1.0);
    EXPECT_LE(s, k);
    // Not one-hot, so strictly below K.
    EXPECT_LT(s, k);
  }
}

TEST(FeatureOverloadsTest, RowOrderDoesNotMatter) {
  Rng rng(12);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 40, 3);
  const Eigen::MatrixXd y = testing::normal_matrix(rng, 30, 3, 1.4);
  const auto xid = testing::make_ids(40, "x");
  const auto yid = testing::make_ids(30, "y");
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd xp(40, 3);
  std::vector<std::string> xpid(40);
  for (int i = 0; i < 40; ++i) {
    xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    xpid[static_cast<std::size_t>(i)] = xid[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  }
  const FeatureMatrix a(xid, x), ap(xpid, xp), b(yid, y);
  EXPECT_EQ(fid(a, b).value, fid(ap, b).value);
  EXPECT_EQ(kid(a, b, 20, 5, 3).value, kid(ap, b, 20, 5, 3).value);
  EXPECT_EQ(mmd_unbiased(a, b, GaussianKernel{1.0}).value,
            mmd_unbiased(ap, b, GaussianKernel{1.0}).value);
  EXPECT_EQ(mmd_unbiased(a, b, kid_kernel(3)).metric, BaselineMetric::kKid);
}

TEST(MetricNamesTest, RoundTrip) {
  for (auto m : {BaselineMetric::kFid, BaselineMetric::kKid, BaselineMetric::kMmdLinear,
                 BaselineMetric::kMmdGaussian, BaselineMetric::kInceptionScore}) {
    EXPECT_EQ(parse_baseline_metric(metric_name(m)), m);
  }
  EXPECT_EQ(orientation_of(BaselineMetric::kInceptionScore), Orientation::kHigherBetter);
  EXPECT_EQ(orientation_of(BaselineMetric::kFid), Orientation::kLowerBetter);
  EXPECT_FALSE(parse_baseline_metric("fjd").has_value());
}

}  // namespace
}  // namespace dips
