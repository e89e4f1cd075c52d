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
#include <random>

#include "dips/data_io.h"
#include "dips/error.h"

namespace dips {
namespace {

std::vector<std::size_t> id_order(const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  return order;
}

Eigen::MatrixXd rows_in_id_order(const std::vector<std::string>& ids, const Eigen::MatrixXd& m) {
  const auto order = id_order(ids);
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

void check_two_samples(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                "d=" + std::to_string(x.cols()) + " vs d=" + std::to_string(y.cols()));
  }
  if (x.rows() < 2 || y.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "two-sample statistics need m, n >= 2, got " + std::to_string(x.rows()) +
                    " and " + std::to_string(y.rows()));
  }
}

// Sorted sample of `count` distinct indices from [0, n).
std::vector<Eigen::Index> sample_indices(Eigen::Index n, std::size_t count,
                                         std::mt19937_64& rng) {
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

BaselineMetric metric_for_kernel(const Kernel& k) {
  if (std::holds_alternative<LinearKernel>(k)) return BaselineMetric::kMmdLinear;
  if (std::holds_alternative<GaussianKernel>(k)) return BaselineMetric::kMmdGaussian;
  return BaselineMetric::kKid;
}

}  // namespace

std::string_view metric_name(BaselineMetric metric) {
  switch (metric) {
    case BaselineMetric::kFid: return "fid";
    case BaselineMetric::kKid: return "kid";
    case BaselineMetric::kMmdLinear: return "mmd_linear";
    case BaselineMetric::kMmdGaussian: return "mmd_gaussian";
    case BaselineMetric::kInceptionScore: return "is";
  }
  return "unknown";
}

std::optional<BaselineMetric> parse_baseline_metric(std::string_view name) {
  for (auto m : {BaselineMetric::kFid, BaselineMetric::kKid, BaselineMetric::kMmdLinear,
                 BaselineMetric::kMmdGaussian, BaselineMetric::kInceptionScore}) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

Orientation orientation_of(BaselineMetric metric) {
  return metric == BaselineMetric::kInceptionScore ? Orientation::kHigherBetter
                                                   : Orientation::kLowerBetter;
}

std::string_view orientation_name(Orientation orientation) {
  return orientation == Orientation::kLowerBetter ? "lower_better" : "higher_better";
}

namespace {

double fid_with_sqrt(const GaussianSummary& a, const Eigen::MatrixXd& sqrt_a,
                     const GaussianSummary& b) {
  if (a.mean.size() != b.mean.size()) {
    throw Error(ErrorCode::kDimMismatch,
                "d=" + std::to_string(a.mean.size()) + " vs d=" + std::to_string(b.mean.size()));
  }
  const Eigen::MatrixXd inner = sqrt_a * b.cov * sqrt_a;
  const Eigen::MatrixXd cross = sqrtm_psd(0.5 * (inner + inner.transpose()));
  const double trace_sum = a.cov.trace() + b.cov.trace();
  const double value = (a.mean - b.mean).squaredNorm() + trace_sum - 2.0 * cross.trace();
  if (value < 0.0) {
    const double tolerance = 1e-6 * std::max(1.0, trace_sum);
    if (value < -tolerance) {
      throw Error(ErrorCode::kEigenFailure,
                  "FID evaluated to " + std::to_string(value) + "; covariances ill-conditioned");
    }
    return 0.0;
  }
  return value;
}

}  // namespace

double fid_from_summaries(const GaussianSummary& a, const GaussianSummary& b) {
  return fid_with_sqrt(a, sqrtm_psd(a.cov), b);
}

FidReference make_fid_reference(const Eigen::MatrixXd& real) {
  FidReference ref;
  ref.summary = gaussian_summary(real);
  ref.sqrt_cov = sqrtm_psd(ref.summary.cov);
  return ref;
}

BaselineScore fid(const FidReference& real, const Eigen::MatrixXd& fake) {
  if (fake.cols() != real.summary.mean.size()) {
    throw Error(ErrorCode::kDimMismatch, "d=" + std::to_string(real.summary.mean.size()) +
                                             " vs d=" + std::to_string(fake.cols()));
  }
  if (fake.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "FID needs n >= 2 fake samples");
  }
  BaselineScore score;
  score.metric = BaselineMetric::kFid;
  score.orientation = Orientation::kLowerBetter;
  score.m = real.summary.n;
  score.n = static_cast<std::size_t>(fake.rows());
  score.value = fid_with_sqrt(real.summary, real.sqrt_cov, gaussian_summary(fake));
  const auto smaller = std::min(score.m, score.n);
  if (smaller < static_cast<std::size_t>(fake.cols())) {
    score.warnings.push_back("SmallSampleFid: min(m, n) = " + std::to_string(smaller) +
                             " is below the feature dimension " + std::to_string(fake.cols()) +
                             "; covariance estimates are rank-deficient");
  }
  return score;
}

BaselineScore fid(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake) {
  check_two_samples(real, fake);
  return fid(make_fid_reference(real), fake);
}

BaselineScore fid(const FeatureMatrix& real, const FeatureMatrix& fake) {
  return fid(rows_in_id_order(real.ids(), real.values()),
             rows_in_id_order(fake.ids(), fake.values()));
}

double mmd_unbiased_value(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Kernel& k) {
  check_two_samples(x, y);
  const double m = static_cast<double>(x.rows());
  const double n = static_cast<double>(y.rows());
  const Eigen::MatrixXd kxx = kernel_matrix(k, x, x);
  const Eigen::MatrixXd kyy = kernel_matrix(k, y, y);
  const Eigen::MatrixXd kxy = kernel_matrix(k, x, y);
  const double within_x = (kxx.sum() - kxx.trace()) / (m * (m - 1.0));
  const double within_y = (kyy.sum() - kyy.trace()) / (n * (n - 1.0));
  const double cross = kxy.sum() * 2.0 / (m * n);
  return within_x + within_y - cross;
}

BaselineScore mmd_unbiased(const FeatureMatrix& x, const FeatureMatrix& y, const Kernel& k) {
  BaselineScore score;
  score.metric = metric_for_kernel(k);
  score.orientation = Orientation::kLowerBetter;
  score.m = x.rows();
  score.n = y.rows();
  score.value = mmd_unbiased_value(rows_in_id_order(x.ids(), x.values()),
                                   rows_in_id_order(y.ids(), y.values()), k);
  return score;
}

double median_heuristic_bandwidth(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  std::uint64_t seed, std::size_t max_pairs) {
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimMismatch,
                "d=" + std::to_string(x.cols()) + " vs d=" + std::to_string(y.cols()));
  }
  Eigen::MatrixXd pooled(x.rows() + y.rows(), x.cols());
  pooled << x, y;
  const auto total = static_cast<std::size_t>(pooled.rows());
  if (total < 2) throw Error(ErrorCode::kTooFewSamples, "need at least two pooled rows");
  if (max_pairs == 0) throw Error(ErrorCode::kInvalidArgument, "max_pairs must be positive");

  std::vector<double> distances;
  const std::size_t all_pairs = total * (total - 1) / 2;
  if (all_pairs <= max_pairs) {
    distances.reserve(all_pairs);
    for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < pooled.rows(); ++j) {
        distances.push_back((pooled.row(i) - pooled.row(j)).norm());
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> first(0, pooled.rows() - 1);
    std::uniform_int_distribution<Eigen::Index> other(0, pooled.rows() - 2);
    distances.reserve(max_pairs);
    for (std::size_t t = 0; t < max_pairs; ++t) {
      const Eigen::Index i = first(rng);
      Eigen::Index j = other(rng);
      if (j >= i) ++j;
      distances.push_back((pooled.row(i) - pooled.row(j)).norm());
    }
  }
  std::sort(distances.begin(), distances.end());
  const std::size_t mid = distances.size() / 2;
  const double median = distances.size() % 2 == 1
                            ? distances[mid]
                            : 0.5 * (distances[mid - 1] + distances[mid]);
  if (!(median > 0.0)) {
    throw Error(ErrorCode::kDegenerateInput,
                "median pairwise distance is 0; pass an explicit bandwidth");
  }
  return median;
}

PolynomialKernel kid_kernel(Eigen::Index dim) {
  return PolynomialKernel{3, 1.0 / static_cast<double>(dim), 1.0};
}

std::vector<double> kid_subset_values(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake,
                                      std::size_t subset_size, int n_subsets,
                                      std::uint64_t seed) {
  check_two_samples(real, fake);
  if (n_subsets < 1) throw Error(ErrorCode::kInvalidArgument, "n_subsets must be >= 1");
  if (subset_size < 2) throw Error(ErrorCode::kInvalidArgument, "subset_size must be >= 2");
  const auto limit = static_cast<std::size_t>(std::min(real.rows(), fake.rows()));
  if (subset_size > limit) {
    throw Error(ErrorCode::kSubsetTooLarge,
                "subset_size " + std::to_string(subset_size) + " exceeds min(m, n) = " +
                    std::to_string(limit));
  }
  const Kernel k = kid_kernel(real.cols());
  std::mt19937_64 rng(seed);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_subsets));
  for (int s = 0; s < n_subsets; ++s) {
    const auto real_rows = sample_indices(real.rows(), subset_size, rng);
    const auto fake_rows = sample_indices(fake.rows(), subset_size, rng);
    values.push_back(
        mmd_unbiased_value(gather_rows(real, real_rows), gather_rows(fake, fake_rows), k));
  }
  return values;
}

BaselineScore kid(const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake,
                  std::size_t subset_size, int n_subsets, std::uint64_t seed) {
  const auto values = kid_subset_values(real, fake, subset_size, n_subsets, seed);
  BaselineScore score;
  score.metric = BaselineMetric::kKid;
  score.orientation = Orientation::kLowerBetter;
  score.m = static_cast<std::size_t>(real.rows());
  score.n = static_cast<std::size_t>(fake.rows());
  score.value = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  return score;
}

BaselineScore kid(const FeatureMatrix& real, const FeatureMatrix& fake,
                  std::size_t subset_size, int n_subsets, std::uint64_t seed) {
  return kid(rows_in_id_order(real.ids(), real.values()),
             rows_in_id_order(fake.ids(), fake.values()), subset_size, n_subsets, seed);
}

double inception_score_value(const Eigen::MatrixXd& probs, int n_splits) {
  const Eigen::Index n = probs.rows();
  const Eigen::Index k = probs.cols();
  if (n == 0 || k == 0) throw Error(ErrorCode::kEmptyInput, "no predictions");
  if (n_splits < 1 || n_splits > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "n_splits must lie in [1, " + std::to_string(n) + "]");
  }
  const Eigen::Index base = n / n_splits;
  long double score_sum = 0.0L;
  for (int s = 0; s < n_splits; ++s) {
    const Eigen::Index begin = s * base;
    const Eigen::Index end = s + 1 == n_splits ? n : begin + base;
    const auto rows = static_cast<long double>(end - begin);

    // Extended precision keeps the marginal exact for identical rows.
    std::vector<long double> marginal(static_cast<std::size_t>(k), 0.0L);
    for (Eigen::Index i = begin; i < end; ++i) {
      for (Eigen::Index c = 0; c < k; ++c) marginal[static_cast<std::size_t>(c)] += probs(i, c);
    }
    for (auto& q : marginal) q /= rows;

    long double kl_sum = 0.0L;
    for (Eigen::Index i = begin; i < end; ++i) {
      for (Eigen::Index c = 0; c < k; ++c) {
        const long double p = probs(i, c);
        if (p > 0.0L) kl_sum += p * std::log(p / marginal[static_cast<std::size_t>(c)]);
      }
    }
    score_sum += std::exp(kl_sum / rows);
  }
  const double score = static_cast<double>(score_sum / n_splits);
  return std::clamp(score, 1.0, static_cast<double>(k));
}

BaselineScore inception_score(const PredictionSet& p, int n_splits) {
  BaselineScore score;
  score.metric = BaselineMetric::kInceptionScore;
  score.orientation = Orientation::kHigherBetter;
  score.m = p.rows();
  score.n = p.rows();
  score.value = inception_score_value(rows_in_id_order(p.ids(), p.probs()), n_splits);
  return score;
}

}  // namespace dips
