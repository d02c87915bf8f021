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
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bregrank/glm.hpp"
#include "bregrank/letordata.hpp"
#include "bregrank/mrtrain.hpp"
#include "testutil.hpp"

using namespace bregrank;
using namespace bregrank::testutil;

namespace {

Eigen::VectorXi igrades(std::initializer_list<int> values) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (int x : values) v[i++] = x;
  return v;
}

Dataset identity_query(const Eigen::VectorXi& grades) {
  Dataset ds;
  QuerySet qs;
  qs.qid = "1";
  qs.features = Eigen::MatrixXd::Identity(grades.size(), grades.size());
  qs.grades = grades;
  qs.doc_ids.assign(static_cast<size_t>(grades.size()), "");
  ds.queries.push_back(std::move(qs));
  ds.feature_dim = grades.size();
  ds.gmax = grades.maxCoeff();
  return ds;
}

Dataset small_synth(std::uint64_t seed, double noise_sd = 0.0) {
  SynthConfig cfg;
  cfg.n_queries = 4;
  cfg.docs_per_query = 6;
  cfg.n_features = 3;
  cfg.grade_levels = 3;
  cfg.noise_sd = noise_sd;
  cfg.seed = seed;
  return synth_generate(cfg).first;
}

TrainConfig tight_config(DivergenceKind kind) {
  TrainConfig config;
  config.divergence = DivergenceSpec::make(kind);
  config.outer_tol = 1e-10;
  config.max_outer = 300;
  config.glm.tol = 1e-12;
  config.glm.max_iter = 2000;
  return config;
}

// every substep may only lower the objective, up to solver slack
void check_monotone(const TrainTrace& trace, double tol = 1e-10) {
  REQUIRE(trace.substeps.size() + 1 == trace.rows.size());
  for (size_t t = 1; t < trace.rows.size(); ++t) {
    const double prev = trace.rows[t - 1].objective;
    const auto& sub = trace.substeps[t - 1];
    const double slack = tol * std::max(1.0, std::abs(prev));
    CHECK(sub[0] <= prev + slack);
    CHECK(sub[1] <= sub[0] + slack);
    CHECK(sub[2] <= sub[1] + slack);
    CHECK(trace.rows[t].objective == sub[2]);
    CHECK(trace.rows[t].retarget_obj == sub[0]);
  }
}

}  // namespace

TEST_SUITE_BEGIN("mrtrain");

TEST_CASE("path resolution picks the exact solver per kind") {
  CHECK(resolve_retarget(RetargetPath::Auto, DivergenceKind::SquaredEuclidean) ==
        RetargetPath::SquaredSimplex);
  CHECK(resolve_retarget(RetargetPath::Auto, DivergenceKind::KLSimplex) ==
        RetargetPath::DualMap);
  CHECK(resolve_retarget(RetargetPath::Auto, DivergenceKind::ShiftedGI) ==
        RetargetPath::DualMap);
  CHECK(resolve_retarget(RetargetPath::Inner, DivergenceKind::KLSimplex) ==
        RetargetPath::Inner);
}

TEST_CASE("gain-normalized fixed targets at hand points") {
  const Eigen::VectorXi grades = igrades({2, 0});
  const Eigen::VectorXd kl =
      baseline_targets(DivergenceSpec::kl_simplex(), grades);
  CHECK(kl[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kl[1] == doctest::Approx(0.0).epsilon(1e-15));
  const Eigen::VectorXd sq = baseline_targets(DivergenceSpec::squared(), grades);
  CHECK(max_abs_diff(sq, kl) == 0.0);
  const Eigen::VectorXd gi =
      baseline_targets(DivergenceSpec::shifted_gi(), grades);
  CHECK(gi[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(gi[1] == doctest::Approx(1.0).epsilon(1e-15));

  const Eigen::VectorXi zeros = igrades({0, 0, 0, 0});
  const Eigen::VectorXd uniform =
      baseline_targets(DivergenceSpec::kl_simplex(), zeros);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(uniform[i] == doctest::Approx(0.25).epsilon(1e-15));
  }
  const Eigen::VectorXd gi_uniform =
      baseline_targets(DivergenceSpec::shifted_gi(), zeros);
  CHECK(gi_uniform[0] == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("starting targets are feasible for every kind") {
  const Eigen::VectorXi grades = igrades({2, 2, 1, 0});
  for (DivergenceKind kind : all_kinds()) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    const Eigen::VectorXd t = initial_targets(spec, grades);
    REQUIRE(t.size() == 4);
    for (Eigen::Index i = 0; i + 1 < t.size(); ++i) CHECK(t[i] >= t[i + 1]);
    if (kind == DivergenceKind::ShiftedGI) {
      CHECK(t.minCoeff() > 1.0);
      CHECK(std::abs((t.array() - 1.0).sum() - 1.0) <= 1e-12);
    } else {
      CHECK(std::abs(t.sum() - 1.0) <= 1e-12);
      CHECK(t.minCoeff() >= 0.0);
    }
    if (kind == DivergenceKind::KLSimplex) CHECK(t.minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(
      initial_targets(DivergenceSpec::kl_simplex(), igrades({0, 1})),
      ConeViolation);
}

TEST_CASE("one block and a free design reach a near-zero objective") {
  const Dataset ds = identity_query(igrades({1, 1, 1}));
  const TrainResult res = train_mr(tight_config(DivergenceKind::KLSimplex), ds);
  CHECK(res.trace.converged);
  CHECK(res.trace.rows.back().objective <= 1e-8);
}

TEST_CASE("strictly graded identity design is a fixed point") {
  const Dataset ds = identity_query(igrades({3, 2, 1, 0}));
  const TrainResult res = train_mr(tight_config(DivergenceKind::KLSimplex), ds);
  CHECK(res.trace.converged);
  for (const TraceRow& row : res.trace.rows) CHECK(row.perm_changes == 0);
  const auto& last = res.trace.substeps.back();
  CHECK(std::abs(last[0] - last[2]) <= 1e-8);
}

TEST_CASE("every substep is monotone on synthetic data") {
  const Dataset ds = small_synth(111, 0.2);
  for (DivergenceKind kind : all_kinds()) {
    for (RetargetPath path : {RetargetPath::Auto, RetargetPath::Inner}) {
      TrainConfig config = tight_config(kind);
      config.outer_tol = 1e-8;
      config.max_outer = 40;
      config.retarget = path;
      const TrainResult res = train_mr(config, ds);
      check_monotone(res.trace);
      CHECK(res.trace.rows.back().objective <=
            res.trace.rows.front().objective + 1e-12);
    }
  }
}

TEST_CASE("training is deterministic") {
  const Dataset ds = small_synth(112, 0.1);
  TrainConfig config = tight_config(DivergenceKind::KLSimplex);
  config.max_outer = 30;
  const TrainResult a = train_mr(config, ds);
  const TrainResult b = train_mr(config, ds);
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (size_t t = 0; t < a.trace.rows.size(); ++t) {
    CHECK(a.trace.rows[t].objective == b.trace.rows[t].objective);
  }
  CHECK(max_abs_diff(a.model.w, b.model.w) == 0.0);
}

TEST_CASE("fixed-target reference fit matches a direct model fit") {
  const Dataset ds = small_synth(113);
  TrainConfig config = tight_config(DivergenceKind::ShiftedGI);
  const TrainResult res = train_baseline(config, ds);
  REQUIRE(res.trace.rows.size() == 1);
  CHECK(res.trace.rows[0].iter == 0);

  std::vector<Eigen::MatrixXd> feats;
  std::vector<Eigen::VectorXd> targets;
  for (const QuerySet& qs : ds.queries) {
    feats.push_back(qs.features);
    targets.push_back(baseline_targets(config.divergence, qs.grades));
  }
  const FitResult direct =
      glm_fit(config.divergence, feats, targets, config.C, config.glm);
  CHECK(res.trace.rows[0].objective ==
        doctest::Approx(direct.objective).epsilon(1e-12));
  CHECK(max_abs_diff(res.model.w, direct.w) <= 1e-12);
}

TEST_CASE("retargeting beats the fixed-target reference on clean data") {
  const Dataset ds = small_synth(114);
  for (DivergenceKind kind : all_kinds()) {
    TrainConfig config = tight_config(kind);
    config.max_outer = 120;
    const double mr = train_mr(config, ds).trace.rows.back().objective;
    const double fixed = train_baseline(config, ds).trace.rows.back().objective;
    CHECK(mr <= fixed + 1e-9);
  }
}

TEST_CASE("the exact squared path rejects the dual-map rule") {
  TrainConfig config = tight_config(DivergenceKind::SquaredEuclidean);
  config.retarget = RetargetPath::DualMap;
  CHECK_THROWS_AS(train_mr(config, identity_query(igrades({1, 0}))), Error);
}

TEST_CASE("degenerate training data is rejected") {
  TrainConfig config = tight_config(DivergenceKind::KLSimplex);
  CHECK_THROWS_AS(train_mr(config, Dataset{}), EmptyDataset);

  Dataset bad = identity_query(igrades({1, 0}));
  bad.queries[0].grades[1] = -1;
  CHECK_THROWS_AS(train_mr(config, bad), DomainViolation);
}

TEST_CASE("trained models carry offsets and pass-through scaling") {
  const Dataset ds = small_synth(115);
  TrainConfig config = tight_config(DivergenceKind::KLSimplex);
  config.max_outer = 20;
  const TrainResult res = train_mr(config, ds);
  CHECK(res.model.w.size() == ds.feature_dim);
  CHECK(res.model.trained_offsets.size() == ds.queries.size());
  CHECK(res.model.feature_norm.mode == FeatureNormMode::None);
  CHECK(res.model.C == config.C);
  CHECK(res.model.normalized == config.normalized);
}

TEST_CASE("trace CSV layout and roundtrip") {
  const Dataset ds = small_synth(116, 0.3);
  TrainConfig config = tight_config(DivergenceKind::SquaredEuclidean);
  config.max_outer = 10;
  const TrainResult res = train_mr(config, ds);

  TempDir dir;
  write_trace_csv(res.trace, dir.file("trace.csv"));
  const std::vector<std::string> lines = read_lines(dir.file("trace.csv"));
  REQUIRE(lines.size() == res.trace.rows.size() + 1);
  CHECK(lines[0] == "iter,objective,retarget_obj,perm_changes,seconds");
  for (size_t t = 0; t < res.trace.rows.size(); ++t) {
    const std::vector<std::string> cells = split_csv(lines[t + 1]);
    REQUIRE(cells.size() == 5);
    CHECK(std::stoi(cells[0]) == res.trace.rows[t].iter);
    CHECK(std::stod(cells[1]) == res.trace.rows[t].objective);
    CHECK(std::stod(cells[2]) == res.trace.rows[t].retarget_obj);
    CHECK(std::stoi(cells[3]) == res.trace.rows[t].perm_changes);
  }
}

TEST_SUITE_END();
