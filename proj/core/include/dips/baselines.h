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
// Unsupervised GAN evaluation metrics used as baselines: FID, KID, unbiased
// MMD with linear or Gaussian kernel, and the Inception Score.
//
// The FeatureMatrix / PredictionSet overloads first put rows into id order,
// so their results do not depend on the row order of the input files.

#ifndef DIPS_BASELINES_H_
#define DIPS_BASELINES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dips/stats.h"

namespace dips {

class FeatureMatrix;
class PredictionSet;

enum class BaselineMetric { kFid, kKid, kMmdLinear, kMmdGaussian, kInceptionScore };
enum class Orientation { kLowerBetter, kHigherBetter };

std::string_view metric_name(BaselineMetric metric);
// Accepts "fid", "kid", "mmd_linear", "mmd_gaussian", "is".
std::optional<BaselineMetric> parse_baseline_metric(std::string_view name);
Orientation orientation_of(BaselineMetric metric);
std::string_view orientation_name(Orientation orientation);

struct BaselineScore {
  BaselineMetric metric = BaselineMetric::kFid;
  double value = 0.0;
  Orientation orientation = Orientation::kLowerBetter;
  std::size_t m = 0;  // first sample size
  std::size_t n = 0;  // second sample size
  std::vector<std::string> warnings;

  friend bool operator==(const BaselineScore&, const BaselineScore&) = default;
};

// ||mu_a - mu_b||^2 + Tr(C_a) + Tr(C_b) - 2 Tr(sqrt(S_a C_b S_a)), with
// S_a = sqrt(C_a). Roundoff below zero is clamped to 0.
double fid_from_summaries(const GaussianSummary& a, const GaussianSummary& b);

BaselineScore fid(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake);

// Reference side of repeated FID evaluations, with its covariance square
// root computed once.
struct FidReference {
  GaussianSummary summary;
  Eigen::MatrixXd sqrt_cov;
};
FidReference make_fid_reference(const Eigen::MatrixXd& real);
BaselineScore fid(const FidReference& real, const Eigen::MatrixXd& fake);
BaselineScore fid(const FeatureMatrix& real, const FeatureMatrix& fake);

// Unbiased squared MMD; may be negative.
double mmd_unbiased_value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                          const Kernel& k);
BaselineScore mmd_unbiased(const FeatureMatrix& x, const FeatureMatrix& y,
                           const Kernel& k);

// Median pairwise Euclidean distance over the pooled rows of x and y. Uses all
// pairs when there are at most max_pairs of them, otherwise a seeded sample
// of max_pairs pairs. Throws DegenerateInput when the median is 0.
double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  std::uint64_t seed, std::size_t max_pairs = 2000);

// Degree 3, gamma = 1/d, coef0 = 1.
PolynomialKernel kid_kernel(Eigen::Index dim);

// Polynomial-kernel MMD on n_subsets seeded subsets (drawn without
// replacement, kept in row order) of each input.
std::vector<double> kid_subset_values(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake,
                                      std::size_t subset_size, int n_subsets,
                                      std::uint64_t seed);
BaselineScore kid(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake,
                  std::size_t subset_size, int n_subsets, std::uint64_t seed);
BaselineScore kid(const FeatureMatrix& real, const FeatureMatrix& fake,
                  std::size_t subset_size, int n_subsets, std::uint64_t seed);

// Rows are per-sample class distributions. The last split takes the
// remainder. The result is clamped to its mathematical range [1, K].
double inception_score_value(const Eigen::MatrixXd& probs, int n_splits);
BaselineScore inception_score(const PredictionSet& p, int n_splits = 1);

}  // namespace dips

#endif  // DIPS_BASELINES_H_
