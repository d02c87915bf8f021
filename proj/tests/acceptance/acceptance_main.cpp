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

// Release gate: every check prints one PASS/FAIL line (SKIP when optional
// inputs are absent) and the process exits nonzero iff any check failed.
// Checks compare the fast library paths against independent brute-force
// oracles and verify the end-to-end training and evaluation behavior.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bregrank/blockperm.hpp"
#include "bregrank/divergence.hpp"
#include "bregrank/glm.hpp"
#include "bregrank/isotonic.hpp"
#include "bregrank/letordata.hpp"
#include "bregrank/mrtrain.hpp"
#include "bregrank/ordercone.hpp"
#include "bregrank/projector.hpp"
#include "bregrank/rankmetrics.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

using namespace bregrank;
using namespace bregrank::testutil;

namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Outcome {
  bool pass = false;
  std::string stats;
};

class Gate {
 public:
  void run(const std::string& what, const std::function<Outcome()>& check) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.stats = std::string("exception: ") + e.what();
    }
    print(outcome.pass ? "PASS" : "FAIL", what, outcome.stats);
    if (!outcome.pass) ++failures_;
  }

  void skip(const std::string& what, const std::string& why) {
    print("SKIP", what, why);
  }

  int finish() const {
    std::printf("%s (%d failed)\n", failures_ == 0 ? "ALL CHECKS PASSED" : "GATE FAILED",
                failures_);
    return failures_ == 0 ? 0 : 1;
  }

 private:
  void print(const char* status, const std::string& what, const std::string& stats) {
    std::printf("[%02d] %s %s%s%s%s\n", ++index_, status, what.c_str(),
                stats.empty() ? "" : " (", stats.c_str(), stats.empty() ? "" : ")");
    std::fflush(stdout);
  }

  int index_ = 0;
  int failures_ = 0;
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// ---------------------------------------------------------------------------
// isotonic regression vs exhaustive pool enumeration

Outcome check_pav_oracle() {
  Rng rng(201);
  const auto t0 = std::chrono::steady_clock::now();
  double max_err = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::VectorXd y = 3.0 * gaussian_vec(rng, d);
    if (i % 2 == 0) {
      max_err = std::max(max_err,
                         max_abs_diff(pav_descending(y), oracle::isotonic_lsq(y)));
    } else {
      const Eigen::VectorXd w = random_weights(rng, d);
      max_err = std::max(
          max_err, max_abs_diff(pav_descending(y, w), oracle::isotonic_lsq(y, w)));
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = max_err <= 1e-9 && elapsed < 5.0;
  o.stats = strf("500 instances, max err %.2e, %.2f s", max_err, elapsed);
  return o;
}

// ---------------------------------------------------------------------------
// one pooling rule for every divergence kind

Outcome check_pooling_universality() {
  Rng rng(202);
  double max_err = 0.0;
  int pattern_mismatches = 0;
  int count = 0;
  for (DivergenceKind kind :
       {DivergenceKind::KLSimplex, DivergenceKind::ShiftedGI}) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    for (int i = 0; i < 100; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
      const Eigen::VectorXd s = 2.0 * gaussian_vec(rng, d);
      const Eigen::VectorXd mu = backward_map(spec.head(d), s);
      const Eigen::VectorXd direct = oracle::cone_min(spec.head(d), mu);
      const Eigen::VectorXd fit = pav_descending(s);
      const Eigen::VectorXd mapped = backward_map(spec.head(d), fit);
      max_err = std::max(max_err, max_abs_diff(direct, mapped));
      if (oracle::pool_pattern(direct) != oracle::pool_pattern(fit)) {
        ++pattern_mismatches;
      }
      ++count;
    }
  }
  Outcome o;
  o.pass = max_err <= 1e-4 && pattern_mismatches == 0;
  o.stats = strf("%d points, max err %.2e, %d pattern mismatches", count,
                 max_err, pattern_mismatches);
  return o;
}

// ---------------------------------------------------------------------------
// within-block sorting vs exhaustive permutation enumeration

Outcome check_sorting_optimality() {
  Rng rng(203);
  int violations = 0;
  int trials = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 5);
    Eigen::VectorXi grades(d);
    for (Eigen::Index i = 0; i < d; ++i) grades[i] = static_cast<int>(rng() % 3);
    const BlockPartition partition = blocks_from_grades(grades);
    const Eigen::VectorXd scores = gaussian_vec(rng, d);

    for (DivergenceKind kind : all_kinds()) {
      const DivergenceSpec spec = DivergenceSpec::make(kind).head(d);
      Eigen::VectorXd targets = sorted_descending(domain_sample(spec, rng, d));
      const BlockPermutation perm = block_sort(targets, scores, partition);

      const auto objective = [&](const std::vector<int>& slot_to_doc) {
        Eigen::VectorXd permuted(d);
        for (Eigen::Index s = 0; s < d; ++s) {
          permuted[s] = scores[slot_to_doc[static_cast<size_t>(s)]];
        }
        return bregman_div(spec, targets, backward_map(spec, permuted));
      };

      const double got = objective(perm.slot_to_doc);
      double best = got;
      for (const std::vector<int>& candidate : oracle::block_permutations(partition)) {
        best = std::min(best, objective(candidate));
      }
      if (got > best + 1e-9 * std::max(1.0, std::abs(best))) ++violations;
      ++trials;
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.stats = strf("%d trials, %d violations", trials, violations);
  return o;
}

// ---------------------------------------------------------------------------
// the divergence evaluated through either coordinate system

Outcome check_duality_identity() {
  Rng rng(204);
  double worst = 0.0;
  for (DivergenceKind kind : all_kinds()) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 4);
      const DivergenceSpec local = spec.head(d);
      const Eigen::VectorXd x = domain_sample(local, rng, d);
      const Eigen::VectorXd y = domain_sample(local, rng, d);
      const double primal = bregman_div(local, x, y);
      const Eigen::VectorXd sx = forward_map(local, x);
      const Eigen::VectorXd sy = forward_map(local, y);
      const double dual = eval_psi(local, sy) - eval_psi(local, sx) -
                          (sy - sx).dot(backward_map(local, sx));
      worst = std::max(worst, std::abs(primal - dual) / (1.0 + std::abs(primal)));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.stats = strf("3000 pairs, worst relative error %.2e", worst);
  return o;
}

// ---------------------------------------------------------------------------
// the gap function is midpoint convex only for the squared kind

Outcome check_gap_dichotomy() {
  Rng rng(205);
  const auto gap = [](const DivergenceSpec& spec, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& s) {
    return eval_phi(spec, x) + eval_psi(spec, s) - x.dot(s);
  };

  const DivergenceSpec squared = DivergenceSpec::squared();
  int convex_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
    const DivergenceSpec local = squared.head(d);
    const Eigen::VectorXd x0 = 3.0 * gaussian_vec(rng, d);
    const Eigen::VectorXd x1 = 3.0 * gaussian_vec(rng, d);
    const Eigen::VectorXd s0 = 3.0 * gaussian_vec(rng, d);
    const Eigen::VectorXd s1 = 3.0 * gaussian_vec(rng, d);
    const double mid = gap(local, 0.5 * (x0 + x1), 0.5 * (s0 + s1));
    const double avg = 0.5 * (gap(local, x0, s0) + gap(local, x1, s1));
    if (mid > avg + 1e-10) ++convex_failures;
  }

  // endpoints paired through the inverse link have zero gap, so any positive
  // midpoint gap breaks midpoint convexity
  int kl_violations = 0;
  int gi_violations = 0;
  for (DivergenceKind kind :
       {DivergenceKind::KLSimplex, DivergenceKind::ShiftedGI}) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    int& hits = kind == DivergenceKind::KLSimplex ? kl_violations : gi_violations;
    for (int i = 0; i < 200; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
      const DivergenceSpec local = spec.head(d);
      const Eigen::VectorXd s0 = 2.0 * gaussian_vec(rng, d);
      const Eigen::VectorXd s1 = 2.0 * gaussian_vec(rng, d);
      const Eigen::VectorXd x0 = backward_map(local, s0);
      const Eigen::VectorXd x1 = backward_map(local, s1);
      const double mid = gap(local, 0.5 * (x0 + x1), 0.5 * (s0 + s1));
      if (mid > 1e-8) ++hits;
    }
  }

  Outcome o;
  o.pass = convex_failures == 0 && kl_violations >= 1 && gi_violations >= 1;
  o.stats = strf(
      "squared: 0 of 10000 segments broke convexity (%d); kl/gi violating "
      "segments: %d/%d",
      convex_failures, kl_violations, gi_violations);
  return o;
}

// ---------------------------------------------------------------------------
// mean decomposition of divergence sums

Outcome check_mean_decomposition() {
  Rng rng(206);
  double worst = 0.0;
  for (DivergenceKind kind : all_kinds()) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    for (int i = 0; i < 100; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
      const DivergenceSpec local = spec.head(d);
      const int K = 2 + static_cast<int>(rng() % 4);
      std::vector<Eigen::VectorXd> sample;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      for (int k = 0; k < K; ++k) {
        sample.push_back(domain_sample(local, rng, d));
        mean += sample.back();
      }
      mean /= static_cast<double>(K);
      const Eigen::VectorXd probe = domain_sample(local, rng, d);

      double lhs = 0.0;
      double centered = 0.0;
      for (const Eigen::VectorXd& x : sample) {
        lhs += bregman_div(local, x, probe);
        centered += bregman_div(local, x, mean);
      }
      lhs /= K;
      centered /= K;
      const double rhs = centered + bregman_div(local, mean, probe);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.stats = strf("300 sample/probe pairs, worst relative error %.2e", worst);
  return o;
}

// ---------------------------------------------------------------------------
// row-action projection vs dense active-set enumeration

Outcome check_projector_oracle() {
  Rng rng(207);
  const DivergenceSpec squared = DivergenceSpec::squared();
  double max_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::VectorXd y = 2.0 * gaussian_vec(rng, d);

    LinearSystem system;
    system.dim = d;
    const Eigen::VectorXd x0 = gaussian_vec(rng, d);
    const int rows = 1 + static_cast<int>(rng() % 4);
    for (int r = 0; r < rows; ++r) {
      LinearRow row;
      row.a = gaussian_vec(rng, d).normalized();
      row.equality = rng() % 5 == 0 && r == 0;
      const double slack = row.equality ? 0.0 : std::abs(gaussian_vec(rng, 1)[0]);
      row.b = row.a.dot(x0) + slack;
      system.rows.push_back(std::move(row));
    }

    const SolverState state =
        bregman_solve(squared.head(d), y, system, UpdateMode::Sequential, 1e-10, 200000);
    max_err = std::max(max_err, max_abs_diff(state.z, oracle::qp_project(y, system)));
  }

  double order_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng() % 4);
    const Eigen::VectorXd y = 2.0 * gaussian_vec(rng, d);
    const SolverState state = bregman_solve(
        squared.head(d), y, order_constraints(d), UpdateMode::Sequential, 1e-10, 200000);
    order_err = std::max(order_err, max_abs_diff(state.z, pav_descending(y)));
  }

  Outcome o;
  o.pass = max_err <= 1e-6 && order_err <= 1e-6;
  o.stats = strf("200 systems max err %.2e, 50 order solves vs isotonic %.2e",
                 max_err, order_err);
  return o;
}

// ---------------------------------------------------------------------------
// analytic model-fit gradient vs central differences

Outcome check_glm_gradient() {
  Rng rng(208);
  double worst = 0.0;
  for (DivergenceKind kind : all_kinds()) {
    const DivergenceSpec spec = DivergenceSpec::make(kind);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n_features = 2 + static_cast<Eigen::Index>(rng() % 3);
      const int n_queries = 2 + static_cast<int>(rng() % 2);
      const double C = (trial % 3) * 0.5;
      const bool normalized = trial % 2 == 0;

      std::vector<Eigen::MatrixXd> feats;
      std::vector<Eigen::VectorXd> targets;
      Eigen::Index total_docs = 0;
      for (int q = 0; q < n_queries; ++q) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng() % 3);
        Eigen::MatrixXd A(d, n_features);
        for (Eigen::Index r = 0; r < d; ++r) {
          A.row(r) = gaussian_vec(rng, n_features).transpose();
        }
        feats.push_back(A);
        targets.push_back(domain_sample(spec.head(d), rng, d));
        total_docs += d;
      }
      (void)total_docs;

      const Eigen::VectorXd w = 0.5 * gaussian_vec(rng, n_features);
      const Eigen::VectorXd beta = 0.3 * gaussian_vec(rng, n_queries);

      Eigen::VectorXd analytic_w;
      Eigen::VectorXd analytic_beta;
      glm_gradient(spec, feats, targets, w, beta, C, normalized, &analytic_w,
                   &analytic_beta);
      Eigen::VectorXd analytic(n_features + n_queries);
      analytic << analytic_w, analytic_beta;

      const auto objective = [&](const Eigen::VectorXd& packed) {
        const Eigen::VectorXd pw = packed.head(n_features);
        const Eigen::VectorXd pb = packed.tail(n_queries);
        return glm_objective(spec, feats, targets, pw, pb, C, normalized);
      };
      Eigen::VectorXd packed(n_features + n_queries);
      packed << w, beta;
      const Eigen::VectorXd numeric = oracle::fd_gradient(objective, packed);
      worst = std::max(worst, max_abs_diff(analytic, numeric) /
                                  (1.0 + analytic.lpNorm<Eigen::Infinity>()));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-5;
  o.stats = strf("150 instances, worst relative error %.2e", worst);
  return o;
}

// ---------------------------------------------------------------------------
// desk-scale training monotonicity and recovery

Dataset big_synth(double noise_sd, std::uint64_t salt) {
  SynthConfig cfg;
  cfg.n_queries = 200;
  cfg.docs_per_query = 20;
  cfg.n_features = 10;
  cfg.grade_levels = 3;
  cfg.noise_sd = noise_sd;
  cfg.seed = 977;
  cfg.salt = salt;
  return synth_generate(cfg).first;
}

TrainConfig scale_config(DivergenceKind kind, RetargetPath path) {
  TrainConfig config;
  config.divergence = DivergenceSpec::make(kind);
  config.retarget = path;
  config.outer_tol = 1e-7;
  config.max_outer = 25;
  config.glm.tol = 1e-10;
  config.glm.max_iter = 300;
  return config;
}

Outcome check_training_monotone() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset train = big_synth(0.1, 0);
  int breaks = 0;
  int substeps = 0;
  for (DivergenceKind kind : all_kinds()) {
    for (RetargetPath path : {RetargetPath::Auto, RetargetPath::Inner}) {
      const TrainResult res = train_mr(scale_config(kind, path), train);
      const TrainTrace& trace = res.trace;
      for (size_t t = 1; t < trace.rows.size(); ++t) {
        const double prev = trace.rows[t - 1].objective;
        const auto& sub = trace.substeps[t - 1];
        const double slack = 1e-10 * std::max(1.0, std::abs(prev));
        if (sub[0] > prev + slack) ++breaks;
        if (sub[1] > sub[0] + slack) ++breaks;
        if (sub[2] > sub[1] + slack) ++breaks;
        substeps += 3;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = breaks == 0 && elapsed < 60.0;
  o.stats = strf("6 runs, %d substeps, %d increases, %.1f s", substeps, breaks,
                 elapsed);
  return o;
}

double heldout_ndcg(const Model& model, const Dataset& test, int N) {
  std::vector<RankedQuery> ranked;
  ranked.reserve(test.queries.size());
  for (const QuerySet& qs : test.queries) {
    ranked.push_back({qs.grades, predict(model, qs.features), test.gmax});
  }
  const MetricReport report = evaluate_queries(ranked, {N});
  return report.ndcg[0];
}

Outcome check_synthetic_recovery() {
  const Dataset clean_train = big_synth(0.0, 0);
  const Dataset clean_test = big_synth(0.0, 2);
  const Dataset noisy_train = big_synth(0.1, 0);
  const Dataset noisy_test = big_synth(0.1, 2);

  double worst_clean = 1.0;
  double worst_noisy = 1.0;
  std::string detail;
  for (DivergenceKind kind : all_kinds()) {
    TrainConfig config = scale_config(kind, RetargetPath::Auto);
    config.max_outer = 50;
    const double clean =
        heldout_ndcg(train_mr(config, clean_train).model, clean_test, 5);
    const double noisy =
        heldout_ndcg(train_mr(config, noisy_train).model, noisy_test, 10);
    worst_clean = std::min(worst_clean, clean);
    worst_noisy = std::min(worst_noisy, noisy);
    detail += strf("%s%s %.3f/%.3f", detail.empty() ? "" : " ",
                   kind_name(kind), clean, noisy);
  }
  Outcome o;
  o.pass = worst_clean >= 0.99 && worst_noisy >= 0.95;
  o.stats = strf("clean ndcg@5 / noisy ndcg@10: %s", detail.c_str());
  return o;
}

// ---------------------------------------------------------------------------
// hand-computed metric values

Outcome check_metric_units() {
  RankedQuery perfect;
  perfect.grades = Eigen::VectorXi(3);
  perfect.grades << 2, 1, 0;
  perfect.scores = Eigen::VectorXd(3);
  perfect.scores << 3, 2, 1;
  perfect.gmax = 2;
  const double ndcg = ndcg_at(perfect, 3).value;

  RankedQuery cascade;
  cascade.grades = Eigen::VectorXi(2);
  cascade.grades << 2, 0;
  cascade.scores = Eigen::VectorXd(2);
  cascade.scores << 2, 1;
  cascade.gmax = 2;
  const double e = err(cascade);

  RankedQuery alternating;
  alternating.grades = Eigen::VectorXi(3);
  alternating.grades << 1, 0, 1;
  alternating.scores = Eigen::VectorXd(3);
  alternating.scores << 3, 2, 1;
  alternating.gmax = 1;
  const double ap = average_precision(alternating).value;

  const double ndcg_err = std::abs(ndcg - 1.0);
  const double err_err = std::abs(e - 0.75);
  const double ap_err = std::abs(ap - 5.0 / 6.0);
  Outcome o;
  o.pass = ndcg_err <= 1e-12 && err_err <= 1e-12 && ap_err <= 1e-12;
  o.stats = strf("ndcg err %.1e, err err %.1e, ap err %.1e", ndcg_err, err_err,
                 ap_err);
  return o;
}

// ---------------------------------------------------------------------------
// optional benchmark-data reproduction

struct FoldResult {
  double mr_map = 0.0;
  double base_map = 0.0;
};

double dataset_map(const Model& model, const Dataset& data) {
  std::vector<RankedQuery> ranked;
  ranked.reserve(data.queries.size());
  for (const QuerySet& qs : data.queries) {
    ranked.push_back({qs.grades, predict(model, qs.features), data.gmax});
  }
  return evaluate_queries(ranked, {}).map;
}

// select C on the validation split by MAP, report test MAP
double sweep_test_map(const Dataset& train, const Dataset& vali,
                      const Dataset& test, bool baseline) {
  const std::vector<double> grid = {1e-50, 1e-20, 1e-10, 1e-5, 1.0, 10.0};
  double best_vali = -1.0;
  Model best_model;
  for (const double c : grid) {
    TrainConfig config;
    config.divergence = DivergenceSpec::kl_simplex();
    config.C = c;
    config.normalized = false;
    config.glm.normalized = false;
    config.outer_tol = 1e-6;
    config.max_outer = 50;
    config.glm.tol = 1e-8;
    config.glm.max_iter = 200;
    const TrainResult res =
        baseline ? train_baseline(config, train) : train_mr(config, train);
    const double v = dataset_map(res.model, vali);
    if (v > best_vali) {
      best_vali = v;
      best_model = res.model;
    }
  }
  return dataset_map(best_model, test);
}

Outcome check_benchmark_folds(const std::string& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  int wins = 0;
  double mean_map = 0.0;
  std::string detail;
  for (int fold = 1; fold <= 5; ++fold) {
    const std::string base = dir + "/Fold" + std::to_string(fold) + "/";
    const Dataset train = parse_letor_file(base + "train.txt");
    const Dataset vali = parse_letor_file(base + "vali.txt");
    const Dataset test = parse_letor_file(base + "test.txt");
    FoldResult r;
    r.mr_map = sweep_test_map(train, vali, test, false);
    r.base_map = sweep_test_map(train, vali, test, true);
    if (r.mr_map >= r.base_map - 1e-12) ++wins;
    mean_map += r.mr_map;
    detail += strf("%sF%d %.4f/%.4f", detail.empty() ? "" : " ", fold, r.mr_map,
                   r.base_map);
  }
  mean_map /= 5.0;
  Outcome o;
  o.pass = wins >= 4 && std::abs(mean_map - 0.657) <= 0.03;
  o.stats = strf("wins %d/5, mean test map %.4f, %s, %.0f s", wins, mean_map,
                 detail.c_str(), seconds_since(t0));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string mq2008_dir;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--mq2008") == 0 && i + 1 < argc) {
      mq2008_dir = argv[++i];
    }
  }
  if (mq2008_dir.empty()) {
    if (const char* env = std::getenv("BREGRANK_MQ2008_DIR")) mq2008_dir = env;
  }

  Gate gate;
  gate.run("isotonic fit equals the exhaustive pool-partition oracle",
           check_pav_oracle);
  gate.run("cone minimizers pool identically for every divergence kind",
           check_pooling_universality);
  gate.run("within-block sorting attains the exhaustive permutation minimum",
           check_sorting_optimality);
  gate.run("primal and dual divergence evaluations agree on interior pairs",
           check_duality_identity);
  gate.run("gap midpoint convexity holds only for the squared kind",
           check_gap_dichotomy);
  gate.run("divergence sums decompose through the sample mean",
           check_mean_decomposition);
  gate.run("row-action projection equals the dense active-set oracle",
           check_projector_oracle);
  gate.run("model-fit gradients match central finite differences",
           check_glm_gradient);
  gate.run("training objective never increases across substeps at full scale",
           check_training_monotone);
  gate.run("synthetic worlds are recovered to held-out ranking quality",
           check_synthetic_recovery);
  gate.run("ranking metrics reproduce hand-computed values", check_metric_units);

  const std::string benchmark_desc =
      "benchmark folds: retargeted training beats the fixed-target baseline";
  if (mq2008_dir.empty()) {
    gate.skip(benchmark_desc,
              "no data; pass --mq2008 <dir> or set BREGRANK_MQ2008_DIR");
  } else {
    gate.run(benchmark_desc, [&] { return check_benchmark_folds(mq2008_dir); });
  }

  return gate.finish();
}
