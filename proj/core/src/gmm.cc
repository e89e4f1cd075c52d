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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "dips/data_io.h"
#include "dips/error.h"

namespace dips {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Params {
  Eigen::VectorXd weights;
  Eigen::MatrixXd means;
  std::vector<Eigen::MatrixXd> covariances;
};

// n x N matrix of log(w_k) + log N(x_i | mu_k, C_k).
Eigen::MatrixXd weighted_log_prob(const Eigen::MatrixXd& x, const Params& p) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index k_count = p.weights.size();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  Eigen::MatrixXd out(n, k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(p.covariances[static_cast<std::size_t>(k)]);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularCovariance,
                  "component " + std::to_string(k) +
                      " covariance is not positive definite after regularization; "
                      "increase covariance_reg or enable PCA");
    }
    const Eigen::MatrixXd& lower = llt.matrixLLT();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    Eigen::MatrixXd centered = (x.rowwise() - p.means.row(k)).transpose();
    llt.matrixL().solveInPlace(centered);
    const Eigen::VectorXd maha = centered.colwise().squaredNorm().transpose();
    out.col(k) = (-0.5 * (static_cast<double>(d) * log_2pi + log_det + maha.array())).matrix();
    out.col(k).array() += std::log(p.weights(k));
  }
  return out;
}

// Normalizes rows of `log_prob` in place into log responsibilities; returns
// the per-row log normalizers.
Eigen::VectorXd normalize_log_rows(Eigen::MatrixXd& log_prob) {
  Eigen::VectorXd log_norm(log_prob.rows());
  for (Eigen::Index i = 0; i < log_prob.rows(); ++i) {
    const double mx = log_prob.row(i).maxCoeff();
    const double lse = mx + std::log((log_prob.row(i).array() - mx).exp().sum());
    log_norm(i) = lse;
    log_prob.row(i).array() -= lse;
  }
  return log_norm;
}

Params m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp, double reg) {
  const Eigen::Index k_count = resp.cols();
  Params p;
  const Eigen::VectorXd nk = (resp.colwise().sum().array() + 10.0 * kEps).transpose();
  p.weights = nk / nk.sum();
  p.means = (resp.transpose() * x).array().colwise() / nk.array();
  p.covariances.reserve(static_cast<std::size_t>(k_count));
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Eigen::MatrixXd centered = x.rowwise() - p.means.row(k);
    Eigen::MatrixXd cov =
        (centered.transpose() * (centered.array().colwise() * resp.col(k).array()).matrix()) /
        nk(k);
    cov = 0.5 * (cov + cov.transpose());
    cov.diagonal().array() += reg;
    p.covariances.push_back(std::move(cov));
  }
  return p;
}

Eigen::MatrixXd kmeans_responsibilities(const Eigen::MatrixXd& x, int k_count,
                                        std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // k-means++ seeding.
  Eigen::MatrixXd centers(k_count, x.cols());
  auto first = static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n));
  if (first >= n) first = n - 1;
  centers.row(0) = x.row(first);
  Eigen::VectorXd closest(n);
  for (Eigen::Index i = 0; i < n; ++i) closest(i) = (x.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k_count; ++c) {
    const double total = closest.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = unif(rng) * total;
      double cumulative = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cumulative += closest(i);
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(unif(rng) * static_cast<double>(n)));
    }
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      closest(i) = std::min(closest(i), (x.row(i) - centers.row(c)).squaredNorm());
    }
  }

  // Lloyd iterations.
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < kKMeansIterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = (x.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k_count; ++c) {
        const double dist = (x.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      if (label[static_cast<std::size_t>(i)] != best) {
        label[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k_count, x.cols());
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k_count), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(label[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k_count; ++c) {
      // An emptied cluster keeps its previous center.
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }

  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k_count);
  for (Eigen::Index i = 0; i < n; ++i) resp(i, label[static_cast<std::size_t>(i)]) = 1.0;
  return resp;
}

Eigen::MatrixXd random_responsibilities(Eigen::Index n, int k_count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd resp(n, k_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < k_count; ++k) resp(i, k) = unif(rng);
    resp.row(i) /= resp.row(i).sum();
  }
  return resp;
}

GmmFit run_em(const Eigen::MatrixXd& x, const GmmConfig& cfg, std::uint64_t run_seed) {
  std::mt19937_64 rng(run_seed);
  const Eigen::MatrixXd init_resp =
      cfg.init == GmmInit::kKMeans ? kmeans_responsibilities(x, cfg.n_components, rng)
                                   : random_responsibilities(x.rows(), cfg.n_components, rng);
  Params params = m_step(x, init_resp, cfg.covariance_reg);

  GmmFit fit;
  double lower_bound = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const double previous = lower_bound;
    Eigen::MatrixXd log_resp = weighted_log_prob(x, params);
    lower_bound = normalize_log_rows(log_resp).mean();
    fit.log_likelihood_trace.push_back(lower_bound);
    params = m_step(x, log_resp.array().exp().matrix(), cfg.covariance_reg);
    fit.iterations = iter;
    if (std::abs(lower_bound - previous) < cfg.tol) {
      fit.converged = true;
      break;
    }
  }

  // Final E-step so responsibilities and labels agree with the returned
  // parameters.
  Eigen::MatrixXd log_resp = weighted_log_prob(x, params);
  fit.log_likelihood_trace.push_back(normalize_log_rows(log_resp).mean());
  fit.responsibilities = log_resp.array().exp().matrix();
  fit.weights = std::move(params.weights);
  fit.means = std::move(params.means);
  fit.covariances = std::move(params.covariances);
  fit.assignments.resize(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    for (int k = 1; k < cfg.n_components; ++k) {
      if (log_resp(i, k) > log_resp(i, best)) best = k;
    }
    fit.assignments[static_cast<std::size_t>(i)] = best;
  }
  return fit;
}

}  // namespace

void validate_gmm_config(const GmmConfig& cfg) {
  if (cfg.n_components < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_components must be positive");
  }
  if (!(cfg.covariance_reg >= 0.0) || !(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.n_init < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "covariance_reg must be >= 0; tol, max_iter and n_init must be positive");
  }
}

GmmFit fit_gmm(const Eigen::MatrixXd& x, const GmmConfig& cfg) {
  validate_gmm_config(cfg);
  if (x.rows() <= cfg.n_components) {
    throw Error(ErrorCode::kTooFewSamples,
                std::to_string(x.rows()) + " samples for " + std::to_string(cfg.n_components) +
                    " components; need n > N");
  }
  if (x.cols() < 1) throw Error(ErrorCode::kDimMismatch, "features need d >= 1");
  if (!x.allFinite()) throw Error(ErrorCode::kNonFiniteValue, "features contain NaN or Inf");

  std::mt19937_64 seeder(cfg.seed);
  GmmFit best;
  bool have_best = false;
  for (int run = 0; run < cfg.n_init; ++run) {
    const std::uint64_t run_seed = run == 0 ? cfg.seed : seeder();
    GmmFit fit = run_em(x, cfg, run_seed);
    if (!have_best || fit.final_log_likelihood() > best.final_log_likelihood()) {
      best = std::move(fit);
      have_best = true;
    }
  }
  return best;
}

GmmFit fit_gmm(const FeatureMatrix& x, const GmmConfig& cfg) {
  return fit_gmm(x.values(), cfg);
}

Eigen::MatrixXd predict_responsibilities(const GmmFit& fit, const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return Eigen::MatrixXd(0, fit.n_components());
  if (x.cols() != fit.means.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                "fit has d=" + std::to_string(fit.means.cols()) + ", input has d=" +
                    std::to_string(x.cols()));
  }
  Params p{fit.weights, fit.means, fit.covariances};
  Eigen::MatrixXd log_resp = weighted_log_prob(x, p);
  normalize_log_rows(log_resp);
  return log_resp.array().exp().matrix();
}

}  // namespace dips
