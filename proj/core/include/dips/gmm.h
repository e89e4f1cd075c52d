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
// Full-covariance Gaussian mixture fitted by expectation-maximization.
//
// The defaults follow the widely used scikit-learn GaussianMixture defaults:
// reg_covar 1e-6 added to every covariance diagonal, tol 1e-3 on the change
// of the mean per-sample log-likelihood, 100 iterations, one initialization
// seeded from k-means. All densities are handled in log space.

#ifndef DIPS_GMM_H_
#define DIPS_GMM_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dips {

class FeatureMatrix;

enum class GmmInit {
  kKMeans,  // k-means++ seeding followed by kKMeansIterations Lloyd steps
  kRandom,  // random responsibilities
};

inline constexpr int kKMeansIterations = 10;

struct GmmConfig {
  int n_components = 2;
  double covariance_reg = 1e-6;
  double tol = 1e-3;
  int max_iter = 100;
  int n_init = 1;
  GmmInit init = GmmInit::kKMeans;
  std::uint64_t seed = 0;
};

// Throws InvalidArgument for non-positive settings.
void validate_gmm_config(const GmmConfig& cfg);

struct GmmFit {
  Eigen::VectorXd weights;                   // N, on the simplex
  Eigen::MatrixXd means;                     // N x d
  std::vector<Eigen::MatrixXd> covariances;  // N of d x d, regularized
  Eigen::MatrixXd responsibilities;          // n x N, rows on the simplex
  std::vector<int> assignments;              // argmax rows, ties -> lowest
  // Mean per-sample log-likelihood after every E-step. The last entry scores
  // the returned parameters.
  std::vector<double> log_likelihood_trace;
  bool converged = false;
  int iterations = 0;

  int n_components() const { return static_cast<int>(weights.size()); }
  double final_log_likelihood() const { return log_likelihood_trace.back(); }
};

// Rows of x are samples. Requires n > N. Deterministic given cfg.seed.
GmmFit fit_gmm(const Eigen::MatrixXd& x, const GmmConfig& cfg);
GmmFit fit_gmm(const FeatureMatrix& x, const GmmConfig& cfg);

// Posterior component probabilities for the rows of x under `fit`. A 0-row x
// yields a 0 x N result.
Eigen::MatrixXd predict_responsibilities(const GmmFit& fit, const Eigen::MatrixXd& x);

}  // namespace dips

#endif  // DIPS_GMM_H_
