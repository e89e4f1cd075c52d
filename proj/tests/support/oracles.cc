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

#include "support/oracles.h"

#include <cmath>
#include <map>
#include <set>
#include <variant>

namespace dips::testing {

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [k, v] : table) index += choose2(v);
  for (const auto& [k, v] : rows) sum_a += choose2(v);
  for (const auto& [k, v] : cols) sum_b += choose2(v);
  const double expected = sum_a * sum_b / choose2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double auc_pair_count(const std::vector<double>& scores, const std::vector<int>& positive) {
  double good = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1;
      if (scores[i] > scores[j]) {
        good += 1;
      } else if (scores[i] == scores[j]) {
        good += 0.5;
      }
    }
  }
  return good / pairs;
}

double balanced_accuracy_direct(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  std::set<int> classes(y_true.begin(), y_true.end());
  double total = 0;
  for (int c : classes) {
    double hit = 0, count = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] != c) continue;
      count += 1;
      if (y_pred[i] == c) hit += 1;
    }
    total += hit / count;
  }
  return total / static_cast<double>(classes.size());
}

double kernel_direct(const Kernel& k, const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
  if (std::holds_alternative<LinearKernel>(k)) {
    double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  }
  if (const auto* g = std::get_if<GaussianKernel>(&k)) {
    double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::exp(-s / (2.0 * g->bandwidth * g->bandwidth));
  }
  const auto& p = std::get<PolynomialKernel>(k);
  double s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return std::pow(p.gamma * s + p.coef0, p.degree);
}

double mmd_double_loop(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Kernel& k) {
  const auto m = x.rows();
  const auto n = y.rows();
  double xx = 0, yy = 0, xy = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j) xx += kernel_direct(k, x.row(i), x.row(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) yy += kernel_direct(k, y.row(i), y.row(j));
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) xy += kernel_direct(k, x.row(i), y.row(j));
  }
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return xx / (md * (md - 1)) + yy / (nd * (nd - 1)) - 2.0 * xy / (md * nd);
}

std::vector<double> ranks_by_counting(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      if (w == v[i]) equal += 1;
    }
    // Positions less+1 .. less+equal, averaged.
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

double pearson_direct(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double kendall_direct(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        tie_x += 1;
      } else if (dy == 0) {
        tie_y += 1;
      } else if ((dx > 0) == (dy > 0)) {
        concordant += 1;
      } else {
        discordant += 1;
      }
    }
  }
  return (concordant - discordant) /
         std::sqrt((concordant + discordant + tie_x) * (concordant + discordant + tie_y));
}

}  // namespace dips::testing
