/*
 * Copyright 2026 The bregrank authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <Eigen/Core>

#include "bregrank/blockperm.hpp"
#include "bregrank/divergence.hpp"
#include "bregrank/glm.hpp"
#include "bregrank/isotonic.hpp"
#include "bregrank/letordata.hpp"
#include "bregrank/mrtrain.hpp"
#include "bregrank/projector.hpp"
#include "bregrank/rankmetrics.hpp"

namespace {

using bregrank::DivergenceKind;
using bregrank::DivergenceSpec;

Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

void BM_PavDescending(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Eigen::VectorXd y = gaussian(rng, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::pav_descending(y));
  }
}
BENCHMARK(BM_PavDescending)->Range(64, 1 << 16);

void BM_RetargetDualMap(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const DivergenceSpec spec = DivergenceSpec::kl_simplex();
  const Eigen::VectorXd scores = gaussian(rng, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::retarget_dualmap(spec, scores));
  }
}
BENCHMARK(BM_RetargetDualMap)->Range(8, 1 << 10);

void BM_RetargetInner(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const DivergenceSpec spec = DivergenceSpec::kl_simplex();
  const Eigen::VectorXd scores = gaussian(rng, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bregrank::retarget_inner(spec, scores, {}, 1e-9, 2000));
  }
}
BENCHMARK(BM_RetargetInner)->Range(8, 256);

void BM_RetargetSquaredSimplex(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const Eigen::VectorXd mu = gaussian(rng, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bregrank::retarget_squared_simplex(mu, {}, 1e-9, 2000));
  }
}
BENCHMARK(BM_RetargetSquaredSimplex)->Range(8, 1 << 10);

void BM_OrderProjection(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Eigen::Index d = state.range(0);
  const DivergenceSpec spec = DivergenceSpec::squared();
  const Eigen::VectorXd y = gaussian(rng, d);
  const bregrank::LinearSystem system = bregrank::order_constraints(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::bregman_solve(spec, y, system));
  }
}
BENCHMARK(BM_OrderProjection)->Range(8, 64);

void BM_BlockSort(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const Eigen::Index d = state.range(0);
  Eigen::VectorXi grades(d);
  for (Eigen::Index i = 0; i < d; ++i) grades[i] = static_cast<int>(rng() % 3);
  const bregrank::BlockPartition partition = bregrank::blocks_from_grades(grades);
  Eigen::VectorXd targets = gaussian(rng, d);
  std::sort(targets.data(), targets.data() + d, std::greater<double>());
  const Eigen::VectorXd scores = gaussian(rng, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::block_sort(targets, scores, partition));
  }
}
BENCHMARK(BM_BlockSort)->Range(16, 1 << 12);

void BM_GlmGradient(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const DivergenceSpec spec = DivergenceSpec::kl_simplex();
  const Eigen::Index n_features = 10;
  const int n_queries = static_cast<int>(state.range(0));
  std::vector<Eigen::MatrixXd> feats;
  std::vector<Eigen::VectorXd> targets;
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  for (int q = 0; q < n_queries; ++q) {
    Eigen::MatrixXd A(20, n_features);
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      A.row(r) = gaussian(rng, n_features).transpose();
    }
    feats.push_back(A);
    Eigen::VectorXd t(20);
    for (Eigen::Index i = 0; i < 20; ++i) t[i] = uniform(rng);
    targets.push_back(t / t.sum());
  }
  const Eigen::VectorXd w = gaussian(rng, n_features);
  const Eigen::VectorXd beta = gaussian(rng, n_queries);
  Eigen::VectorXd gw, gb;
  for (auto _ : state) {
    bregrank::glm_gradient(spec, feats, targets, w, beta, 0.1, true, &gw, &gb);
    benchmark::DoNotOptimize(gw);
  }
}
BENCHMARK(BM_GlmGradient)->Range(8, 256);

void BM_TrainIteration(benchmark::State& state) {
  bregrank::SynthConfig cfg;
  cfg.n_queries = static_cast<int>(state.range(0));
  cfg.docs_per_query = 20;
  cfg.n_features = 10;
  cfg.grade_levels = 3;
  cfg.noise_sd = 0.1;
  cfg.seed = 8;
  const bregrank::Dataset train = bregrank::synth_generate(cfg).first;
  bregrank::TrainConfig config;
  config.divergence = DivergenceSpec::kl_simplex();
  config.max_outer = 2;
  config.outer_tol = 0.0;  // always run the full two iterations
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::train_mr(config, train));
  }
}
BENCHMARK(BM_TrainIteration)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EvaluateMetrics(benchmark::State& state) {
  std::mt19937_64 rng(9);
  std::vector<bregrank::RankedQuery> queries;
  for (int q = 0; q < state.range(0); ++q) {
    bregrank::RankedQuery rq;
    rq.grades = Eigen::VectorXi(50);
    for (Eigen::Index i = 0; i < 50; ++i) rq.grades[i] = static_cast<int>(rng() % 3);
    rq.scores = gaussian(rng, 50);
    rq.gmax = 2;
    queries.push_back(std::move(rq));
  }
  const std::vector<int> cutoffs = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bregrank::evaluate_queries(queries, cutoffs));
  }
}
BENCHMARK(BM_EvaluateMetrics)->Range(16, 1024);

}  // namespace

BENCHMARK_MAIN();
