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
// Numerical primitives shared by the metrics: Gaussian summaries, the PSD
// matrix square root, kernels, confusion matrices, rank statistics and
// correlation measures.

#ifndef DIPS_STATS_H_
#define DIPS_STATS_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace dips {

class FeatureMatrix;

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // unbiased (n - 1) sample covariance, symmetrized
  std::size_t n = 0;
};

// Rows are samples. Throws DegenerateInput when fewer than two rows.
GaussianSummary gaussian_summary(const Eigen::MatrixXd& x);
GaussianSummary gaussian_summary(const FeatureMatrix& x);

// Symmetric PSD square root via eigendecomposition. Negative eigenvalues down
// to -1e-8 (relative to the largest magnitude, floor 1) are clamped to zero;
// anything more negative throws NotPsd. Asymmetry above 1e-9 relative throws
// NotSymmetric.
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a);

struct LinearKernel {};
struct GaussianKernel {
  double bandwidth = 1.0;
};
struct PolynomialKernel {
  int degree = 3;
  double gamma = 1.0;
  double coef0 = 1.0;
};
using Kernel = std::variant<LinearKernel, GaussianKernel, PolynomialKernel>;

// Throws InvalidArgument for bandwidth <= 0 or degree < 1.
void validate_kernel(const Kernel& k);

double kernel_eval(const Kernel& k, std::span<const double> x,
                   std::span<const double> y);

// K(i, j) = k(x_i, y_j) for the rows of x and y.
Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& y);

// K x K counts; rows index the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int class_count);

  int class_count() const { return static_cast<int>(counts_.rows()); }
  std::int64_t count(int true_class, int predicted_class) const {
    return counts_(true_class, predicted_class);
  }
  std::int64_t total() const { return counts_.sum(); }
  void add(int true_class, int predicted_class) {
    ++counts_(true_class, predicted_class);
  }

  // Binary views, class 1 is positive.
  std::int64_t tp() const { return counts_(1, 1); }
  std::int64_t fn() const { return counts_(1, 0); }
  std::int64_t fp() const { return counts_(0, 1); }
  std::int64_t tn() const { return counts_(0, 0); }

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

// Labels must lie in [0, class_count). Empty or unequal inputs throw
// LengthMismatch.
ConfusionMatrix confusion(std::span<const int> y_true,
                          std::span<const int> y_pred, int class_count);

// Mean recall over the classes present in y_true. For two classes this is
// (TPR + TNR) / 2 evaluated as one exact integer ratio, so swapping the
// meaning of the labels yields exactly 1 - value.
double balanced_accuracy(const ConfusionMatrix& cm);

// Mann-Whitney AUC: probability that a random positive outscores a random
// negative, ties counting 1/2. Throws SingleClassPresent when either side is
// empty. Complementing the labels yields exactly 1 - value.
double roc_auc(std::span<const double> scores, std::span<const int> is_positive);

// Average (mid) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> x);

// Correlations. Inputs need equal length >= 3 and finite values; a constant
// argument throws ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
// Coefficient of determination of the least-squares fit y ~ a + b x.
double r_squared(std::span<const double> x, std::span<const double> y);

// num / den for 0 <= num <= den, arranged so that
// ratio(num, den) + ratio(den - num, den) == 1 in floating point.
double complement_exact_ratio(double num, double den);

}  // namespace dips

#endif  // DIPS_STATS_H_
