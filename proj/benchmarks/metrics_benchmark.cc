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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dips/baselines.h"
#include "dips/gmm.h"
#include "dips/pseudo.h"
#include "dips/stats.h"

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double shift) {
  std::normal_distribution<double> dist(shift, 1.0);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = dist(rng);
  }
  return m;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("s" + std::to_string(i));
  return out;
}

// Args: dimension d, with n = 2d samples per side.
void BM_Fid(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd x = gaussian(rng, 2 * d, d, 0.0);
  const Eigen::MatrixXd y = gaussian(rng, 2 * d, d, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(dips::fid(x, y).value);
}
BENCHMARK(BM_Fid)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FidCachedReference(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd x = gaussian(rng, 2 * d, d, 0.0);
  const Eigen::MatrixXd y = gaussian(rng, 2 * d, d, 0.5);
  const dips::FidReference ref = dips::make_fid_reference(x);
  for (auto _ : state) benchmark::DoNotOptimize(dips::fid(ref, y).value);
}
BENCHMARK(BM_FidCachedReference)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

// Args: samples per side.
void BM_MmdGaussian(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd x = gaussian(rng, n, 64, 0.0);
  const Eigen::MatrixXd y = gaussian(rng, n, 64, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dips::mmd_unbiased_value(x, y, dips::GaussianKernel{8.0}));
  }
}
BENCHMARK(BM_MmdGaussian)->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Kid(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = gaussian(rng, 2000, 64, 0.0);
  const Eigen::MatrixXd y = gaussian(rng, 2000, 64, 0.1);
  const auto subsets = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dips::kid(x, y, 1000, subsets, 7).value);
}
BENCHMARK(BM_Kid)->Arg(10)->Unit(benchmark::kMillisecond);

// Args: samples, dimension.
void BM_FitGmm(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto d = static_cast<Eigen::Index>(state.range(1));
  Eigen::MatrixXd x(n, d);
  x.topRows(n / 2) = gaussian(rng, n / 2, d, 0.0);
  x.bottomRows(n - n / 2) = gaussian(rng, n - n / 2, d, 1.0);
  dips::GmmConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dips::fit_gmm(x, cfg).iterations);
}
BENCHMARK(BM_FitGmm)->Args({600, 32})->Args({2000, 64})->Unit(benchmark::kMillisecond);

void BM_PseudoAuc(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(static_cast<Eigen::Index>(n), 2);
  std::vector<int> cl(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u(rng);
    p(static_cast<Eigen::Index>(i), 1) = v;
    p(static_cast<Eigen::Index>(i), 0) = 1.0 - v;
    cl[i] = static_cast<int>(i % 2);
  }
  const auto id = ids(n);
  const dips::PseudoLabeling pseudo = dips::make_pseudo_labeling(id, cl, 2);
  const dips::PredictionSet preds(id, p);
  const dips::Scenario s{{0, 1}};
  for (auto _ : state) benchmark::DoNotOptimize(dips::pseudo_auc(pseudo, s, preds));
}
BENCHMARK(BM_PseudoAuc)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
