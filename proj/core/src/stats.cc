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

#include "dips/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "dips/data_io.h"
#include "dips/error.h"

namespace dips {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kTooFewSamples,
                "correlation needs at least 3 points, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "entry " + std::to_string(i));
    }
  }
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Moments {
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

Moments centered_moments(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  Moments m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  if (m.sxx == 0.0 || m.syy == 0.0) {
    throw Error(ErrorCode::kZeroVariance,
                m.sxx == 0.0 ? "first argument is constant" : "second argument is constant");
  }
  return m;
}

}  // namespace

GaussianSummary gaussian_summary(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) {
    throw Error(ErrorCode::kDegenerateInput,
                "Gaussian summary needs n >= 2, got " + std::to_string(x.rows()));
  }
  GaussianSummary s;
  s.n = static_cast<std::size_t>(x.rows());
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  s.cov = 0.5 * (cov + cov.transpose());
  return s;
}

GaussianSummary gaussian_summary(const FeatureMatrix& x) {
  return gaussian_summary(x.values());
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::kDimMismatch, "matrix square root needs a square matrix");
  }
  if (a.size() == 0) return a;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-9 * scale)) {
    throw Error(ErrorCode::kNotSymmetric,
                "max |A - A^T| = " + std::to_string(asym));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "symmetric eigensolver did not converge");
  }
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double floor = -1e-8 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < floor) {
      throw Error(ErrorCode::kNotPsd, "eigenvalue " + std::to_string(lambda(i)));
    }
    lambda(i) = std::sqrt(std::max(0.0, lambda(i)));
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd s = v * lambda.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

void validate_kernel(const Kernel& k) {
  if (const auto* g = std::get_if<GaussianKernel>(&k)) {
    if (!(g->bandwidth > 0.0) || !std::isfinite(g->bandwidth)) {
      throw Error(ErrorCode::kInvalidArgument, "gaussian bandwidth must be positive");
    }
  } else if (const auto* p = std::get_if<PolynomialKernel>(&k)) {
    if (p->degree < 1) {
      throw Error(ErrorCode::kInvalidArgument, "polynomial degree must be >= 1");
    }
  }
}

double kernel_eval(const Kernel& k, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  validate_kernel(k);
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  if (std::holds_alternative<LinearKernel>(k)) return xv.dot(yv);
  if (const auto* g = std::get_if<GaussianKernel>(&k)) {
    return std::exp(-(xv - yv).squaredNorm() / (2.0 * g->bandwidth * g->bandwidth));
  }
  const auto& p = std::get<PolynomialKernel>(k);
  return std::pow(p.gamma * xv.dot(yv) + p.coef0, p.degree);
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                std::to_string(x.cols()) + " vs " + std::to_string(y.cols()));
  }
  validate_kernel(k);
  if (std::holds_alternative<LinearKernel>(k)) return x * y.transpose();
  if (const auto* g = std::get_if<GaussianKernel>(&k)) {
    const double denom = 2.0 * g->bandwidth * g->bandwidth;
    Eigen::MatrixXd out(x.rows(), y.rows());
    for (Eigen::Index j = 0; j < y.rows(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out(i, j) = std::exp(-(x.row(i) - y.row(j)).squaredNorm() / denom);
      }
    }
    return out;
  }
  const auto& p = std::get<PolynomialKernel>(k);
  Eigen::MatrixXd out = x * y.transpose();
  return out.unaryExpr([&](double v) { return std::pow(p.gamma * v + p.coef0, p.degree); });
}

ConfusionMatrix::ConfusionMatrix(int class_count) {
  if (class_count < 2) {
    throw Error(ErrorCode::kInvalidArgument, "confusion matrix needs >= 2 classes");
  }
  counts_.setZero(class_count, class_count);
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int class_count) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(y_true.size()) + " true vs " +
                    std::to_string(y_pred.size()) + " predicted labels");
  }
  ConfusionMatrix cm(class_count);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "position " + std::to_string(i) + ": (" + std::to_string(t) + ", " +
                      std::to_string(p) + ") outside [0, " + std::to_string(class_count) + ")");
    }
    cm.add(t, p);
  }
  return cm;
}

double complement_exact_ratio(double num, double den) {
  if (2.0 * num <= den) return num / den;
  return 1.0 - (den - num) / den;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  const int k = cm.class_count();
  if (k == 2) {
    const std::int64_t pos = cm.tp() + cm.fn();
    const std::int64_t neg = cm.tn() + cm.fp();
    if (pos > 0 && neg > 0) {
      const double num = static_cast<double>(cm.tp() * neg + cm.tn() * pos);
      const double den = static_cast<double>(2 * pos * neg);
      return complement_exact_ratio(num, den);
    }
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    std::int64_t support = 0;
    for (int p = 0; p < k; ++p) support += cm.count(c, p);
    if (support == 0) continue;
    sum += static_cast<double>(cm.count(c, c)) / static_cast<double>(support);
    ++present;
  }
  if (present == 0) throw Error(ErrorCode::kEmptyInput, "confusion matrix is empty");
  return sum / present;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Positions i..j-1 share the mean of ranks i+1..j.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double roc_auc(std::span<const double> scores, std::span<const int> is_positive) {
  if (scores.size() != is_positive.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(scores.size()) + " scores vs " +
                    std::to_string(is_positive.size()) + " labels");
  }
  const std::vector<double> ranks = average_ranks(scores);
  double positive_rank_sum = 0.0;
  std::int64_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (is_positive[i]) {
      positive_rank_sum += ranks[i];
      ++n_pos;
    }
  }
  const std::int64_t n_neg = static_cast<std::int64_t>(scores.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::kSingleClassPresent,
                std::to_string(n_pos) + " positives, " + std::to_string(n_neg) + " negatives");
  }
  const double u = positive_rank_sum - 0.5 * static_cast<double>(n_pos * (n_pos + 1));
  return complement_exact_ratio(u, static_cast<double>(n_pos * n_neg));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const Moments m = centered_moments(x, y);
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;
  std::int64_t tied_y = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto pairs = static_cast<std::int64_t>(n * (n - 1) / 2);
  if (tied_x == pairs || tied_y == pairs) {
    throw Error(ErrorCode::kZeroVariance,
                tied_x == pairs ? "first argument is constant" : "second argument is constant");
  }
  const double denom = std::sqrt(static_cast<double>(pairs - tied_x) *
                                 static_cast<double>(pairs - tied_y));
  return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

double r_squared(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  // For a least-squares line with intercept, 1 - SS_res / SS_tot reduces to
  // sxy^2 / (sxx * syy).
  const Moments m = centered_moments(x, y);
  return std::min(1.0, (m.sxy * m.sxy) / (m.sxx * m.syy));
}

}  // namespace dips
