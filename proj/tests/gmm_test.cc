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

#include "dips/gmm.h"

#include <cmath>

#include <gtest/gtest.h>

#include "dips/error.h"
#include "support/oracles.h"
#include "support/synthetic.h"

namespace dips {
namespace {

using testing::Rng;

testing::Blobs two_blobs(Rng& rng, int dim, std::size_t per_blob, double offset) {
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(2, dim);
  centers.row(1).setConstant(offset);
  return testing::gaussian_blobs(rng, centers, {per_blob, per_blob}, 1.0);
}

void expect_simplex_rows(const Eigen::MatrixXd& r) {
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    EXPECT_NEAR(r.row(i).sum(), 1.0, 1e-9);
    EXPECT_GE(r.row(i).minCoeff(), 0.0);
  }
}

TEST(GmmTest, SeparatesFarBlobs) {
  Rng rng(1);
  const testing::Blobs b = two_blobs(rng, 2, 200, 100.0);
  GmmConfig cfg;
  cfg.seed = 3;
  const GmmFit fit = fit_gmm(b.x, cfg);
  EXPECT_EQ(testing::adjusted_rand_index(fit.assignments, b.labels), 1.0);
  EXPECT_NEAR(fit.weights.sum(), 1.0, 1e-9);
  expect_simplex_rows(fit.responsibilities);
  EXPECT_TRUE(fit.converged);
}

TEST(GmmTest, SingleComponentClosedForm) {
  Rng rng(2);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 50, 3);
  GmmConfig cfg;
  cfg.n_components = 1;
  const GmmFit fit = fit_gmm(x, cfg);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd biased = centered.transpose() * centered / 50.0;
  EXPECT_LT((fit.means.row(0) - mean).norm(), 1e-12);
  const Eigen::MatrixXd want = biased + 1e-6 * Eigen::MatrixXd::Identity(3, 3);
  EXPECT_LT((fit.covariances[0] - want).norm(), 1e-12);
  EXPECT_EQ(fit.weights[0], 1.0);
}

TEST(GmmTest, DuplicatedSamplesKeepTheirPartition) {
  Rng rng(3);
  const testing::Blobs b = two_blobs(rng, 3, 60, 100.0);
  Eigen::MatrixXd twice(240, 3);
  twice << b.x, b.x;
  const GmmFit once = fit_gmm(b.x, GmmConfig{});
  const GmmFit dup = fit_gmm(twice, GmmConfig{});
  std::vector<int> first(dup.assignments.begin(), dup.assignments.begin() + 120);
  std::vector<int> second(dup.assignments.begin() + 120, dup.assignments.end());
  EXPECT_EQ(first, second);
  EXPECT_EQ(testing::adjusted_rand_index(first, once.assignments), 1.0);
}

TEST(GmmTest, TraceIsNonDecreasingOnRandomData) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 5;
    const Eigen::MatrixXd x = testing::normal_matrix(rng, 80, dim);
    GmmConfig cfg;
    cfg.n_components = 2 + trial % 3;
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.init = trial % 2 ? GmmInit::kRandom : GmmInit::kKMeans;
    cfg.tol = 1e-8;
    const GmmFit fit = fit_gmm(x, cfg);
    for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
      EXPECT_GE(fit.log_likelihood_trace[i], fit.log_likelihood_trace[i - 1] - 1e-7)
          << "trial " << trial << " step " << i;
    }
  }
}

TEST(GmmTest, DeterministicUnderSeed) {
  Rng rng(5);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 100, 4);
  GmmConfig cfg;
  cfg.n_components = 3;
  cfg.seed = 99;
  cfg.n_init = 3;
  const GmmFit a = fit_gmm(x, cfg);
  const GmmFit b = fit_gmm(x, cfg);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
  EXPECT_EQ(a.means, b.means);
}

TEST(GmmTest, BestOfSeveralInitsIsNoWorse) {
  Rng rng(6);
  const Eigen::MatrixXd x = testing::normal_matrix(rng, 90, 2);
  GmmConfig one;
  one.n_components = 4;
  one.seed = 11;
  GmmConfig many = one;
  many.n_init = 5;
  EXPECT_GE(fit_gmm(x, many).final_log_likelihood(), fit_gmm(x, one).final_log_likelihood());
}

TEST(GmmTest, Errors) {
  GmmConfig cfg;
  EXPECT_THROW(
      {
        try {
          fit_gmm(Eigen::MatrixXd::Zero(2, 2), cfg);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kTooFewSamples);
          throw;
        }
      },
      Error);
  cfg.tol = 0;
  EXPECT_THROW(validate_gmm_config(cfg), Error);
}

TEST(PredictResponsibilitiesTest, Behaviour) {
  Rng rng(7);
  const testing::Blobs b = two_blobs(rng, 2, 100, 100.0);
  const GmmFit fit = fit_gmm(b.x, GmmConfig{});
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXd at_mean = fit.means.row(k);
    EXPECT_GT(predict_responsibilities(fit, at_mean)(0, k), 0.999);
  }
  EXPECT_LT((predict_responsibilities(fit, b.x) - fit.responsibilities).cwiseAbs().maxCoeff(),
            1e-9);
  const Eigen::MatrixXd empty(0, 2);
  const Eigen::MatrixXd r = predict_responsibilities(fit, empty);
  EXPECT_EQ(r.rows(), 0);
  EXPECT_EQ(r.cols(), 2);
  EXPECT_THROW(predict_responsibilities(fit, Eigen::MatrixXd::Zero(1, 3)), Error);
}

}  // namespace
}  // namespace dips
