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
#include "bregrank/mrtrain.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "bregrank/blockperm.hpp"

namespace bregrank {

namespace {

// Interior smoothing for simplex-domain starting targets whose gains vanish.
constexpr double kInitSmooth = 1e-3;

Eigen::VectorXd normalized_gains(const Eigen::VectorXi& grades, double smooth) {
  const Eigen::Index d = grades.size();
  Eigen::VectorXd t(d);
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    t[i] = std::exp2(static_cast<double>(grades[i])) - 1.0 + smooth;
    total += t[i];
  }
  if (total <= 0.0) return Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  return t / total;
}

void check_training_data(const Dataset& train) {
  if (train.queries.empty()) throw EmptyDataset("train: no queries");
  for (const QuerySet& qs : train.queries) {
    if (qs.grades.size() == 0) throw EmptyDataset("train: empty query");
    if ((qs.grades.array() < 0).any()) {
      throw DomainViolation("train: negative grade");
    }
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

RetargetPath resolve_retarget(RetargetPath path, DivergenceKind kind) {
  if (path != RetargetPath::Auto) return path;
  return kind == DivergenceKind::SquaredEuclidean ? RetargetPath::SquaredSimplex
                                                  : RetargetPath::DualMap;
}

Eigen::VectorXd baseline_targets(const DivergenceSpec& spec,
                                 const Eigen::VectorXi& grades) {
  Eigen::VectorXd t = normalized_gains(grades, 0.0);
  if (spec.kind() == DivergenceKind::ShiftedGI) t.array() += spec.gi_shift();
  return t;
}

Eigen::VectorXd initial_targets(const DivergenceSpec& spec,
                                const Eigen::VectorXi& grades_desc) {
  for (Eigen::Index i = 0; i + 1 < grades_desc.size(); ++i) {
    if (grades_desc[i] < grades_desc[i + 1]) {
      throw ConeViolation("initial_targets: grades must be descending");
    }
  }
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      return normalized_gains(grades_desc, 0.0);
    case DivergenceKind::KLSimplex:
      // Interior point: the dual map of later iterations never reaches the
      // boundary, so the start should not sit on it either.
      return normalized_gains(grades_desc, kInitSmooth);
    case DivergenceKind::ShiftedGI: {
      Eigen::VectorXd t = normalized_gains(grades_desc, kInitSmooth);
      t.array() += spec.gi_shift();
      return t;
    }
  }
  return normalized_gains(grades_desc, 0.0);
}

namespace {

// Per-query mutable training state. Targets and features live in slot order;
// perm maps slots back to original document rows.
struct QueryState {
  BlockPartition partition;
  BlockPermutation perm;
  Eigen::MatrixXd features;  // slot-ordered rows
  Eigen::VectorXd targets;   // descending
  Eigen::VectorXd inner_x;   // warm start for the Inner path (may be empty)
};

double query_term(const DivergenceSpec& spec, const QueryState& qs,
                  const Eigen::VectorXd& w, double beta) {
  const Eigen::Index d = qs.targets.size();
  const DivergenceSpec local = spec.head(d);
  const Eigen::VectorXd theta =
      qs.features * w + Eigen::VectorXd::Constant(d, beta);
  return bregman_div(local, qs.targets, backward_map(local, theta));
}

double full_objective(const DivergenceSpec& spec,
                      const std::vector<QueryState>& state,
                      const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                      double C, bool normalized) {
  double obj = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    const double scale =
        normalized ? 1.0 / static_cast<double>(state[i].targets.size()) : 1.0;
    obj += scale * query_term(spec, state[i], w, beta[static_cast<Eigen::Index>(i)]);
  }
  return obj + 0.5 * C * w.squaredNorm();
}

// Retarget one query from its slot scores. Candidates that fail to beat the
// incumbent targets (possible for the iterative path, whose warm start is a
// perturbation of the incumbent) are discarded so the step never regresses.
void retarget_query(const TrainConfig& config, RetargetPath path,
                    QueryState& qs, const Eigen::VectorXd& theta) {
  const Eigen::Index d = qs.targets.size();
  const DivergenceSpec local = config.divergence.head(d);
  const Eigen::VectorXd mu = backward_map(local, theta);
  const double incumbent = bregman_div(local, qs.targets, mu);

  Eigen::VectorXd candidate;
  Eigen::VectorXd candidate_x;
  switch (path) {
    case RetargetPath::SquaredSimplex: {
      RetargetResult res = retarget_squared_simplex(
          mu, local.weights(), config.inner_tol, config.inner_max_iter);
      candidate = std::move(res.r);
      break;
    }
    case RetargetPath::DualMap: {
      RetargetResult res = retarget_dualmap(local, theta);
      candidate = std::move(res.r);
      break;
    }
    case RetargetPath::Inner: {
      const Eigen::VectorXd* warm =
          qs.inner_x.size() == d ? &qs.inner_x : nullptr;
      RetargetResult res = retarget_inner(local, theta, config.inner,
                                          config.inner_tol,
                                          config.inner_max_iter, warm);
      candidate = std::move(res.r);
      candidate_x = std::move(res.x);
      break;
    }
    case RetargetPath::Auto:
      throw DomainViolation("retarget_query: unresolved path");
  }

  if (bregman_div(local, candidate, mu) <= incumbent) {
    qs.targets = std::move(candidate);
    if (candidate_x.size() == d) qs.inner_x = std::move(candidate_x);
  }
}

Model finalize_model(const TrainConfig& config, const Dataset& train,
                     const FitResult& fit) {
  Model model;
  model.w = fit.w;
  model.divergence = config.divergence;
  model.C = config.C;
  model.normalized = config.normalized;
  model.feature_norm.mode = FeatureNormMode::None;
  model.feature_norm.min = Eigen::VectorXd::Zero(train.feature_dim);
  model.feature_norm.max = Eigen::VectorXd::Ones(train.feature_dim);
  model.trained_offsets.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
  return model;
}

}  // namespace

TrainResult train_mr(const TrainConfig& config, const Dataset& train) {
  check_training_data(train);
  const RetargetPath path =
      resolve_retarget(config.retarget, config.divergence.kind());
  const size_t nq = train.queries.size();

  std::vector<QueryState> state(nq);
  std::vector<Eigen::MatrixXd> feats(nq);
  std::vector<Eigen::VectorXd> targets(nq);
  for (size_t i = 0; i < nq; ++i) {
    const QuerySet& q = train.queries[i];
    QueryState& qs = state[i];
    qs.partition = blocks_from_grades(q.grades);
    qs.perm = initial_permutation(qs.partition);
    qs.features = apply_block_perm(qs.perm, q.features);
    Eigen::VectorXi grades_desc(q.grades.size());
    for (Eigen::Index s = 0; s < q.grades.size(); ++s) {
      grades_desc[s] = q.grades[qs.perm.slot_to_doc[static_cast<size_t>(s)]];
    }
    qs.targets = initial_targets(config.divergence, grades_desc);
    feats[i] = qs.features;
    targets[i] = qs.targets;
  }

  const auto t0 = std::chrono::steady_clock::now();

  // Bootstrap fit: starting the loop at the retarget step with a zero model
  // would project onto constant scores and erase the grade information the
  // initial targets carry.
  FitResult fit = glm_fit(config.divergence, feats, targets, config.C, config.glm);

  TrainTrace trace;
  trace.rows.push_back(
      {0, fit.objective, fit.objective, 0, elapsed_seconds(t0)});

  double prev_obj = fit.objective;
  for (int iter = 1; iter <= config.max_outer; ++iter) {
    const auto it0 = std::chrono::steady_clock::now();

    // (a) retarget from the current slot scores
    for (size_t i = 0; i < nq; ++i) {
      const Eigen::Index d = state[i].targets.size();
      const Eigen::VectorXd theta =
          state[i].features * fit.w +
          Eigen::VectorXd::Constant(d, fit.beta[static_cast<Eigen::Index>(i)]);
      retarget_query(config, path, state[i], theta);
    }
    const double after_a = full_objective(config.divergence, state, fit.w,
                                          fit.beta, config.C, config.normalized);

    // (b) re-sort documents within blocks by current score
    int perm_changes = 0;
    for (size_t i = 0; i < nq; ++i) {
      const Eigen::VectorXd doc_scores =
          train.queries[i].features * fit.w;  // offset cannot reorder
      const BlockPermutation next =
          block_sort(state[i].targets, doc_scores, state[i].partition);
      if (next.slot_to_doc != state[i].perm.slot_to_doc) {
        for (size_t s = 0; s < next.slot_to_doc.size(); ++s) {
          if (next.slot_to_doc[s] != state[i].perm.slot_to_doc[s]) ++perm_changes;
        }
        state[i].perm = next;
        state[i].features = apply_block_perm(next, train.queries[i].features);
      }
    }
    const double after_b = full_objective(config.divergence, state, fit.w,
                                          fit.beta, config.C, config.normalized);

    // (c) warm-started model refit
    for (size_t i = 0; i < nq; ++i) {
      feats[i] = state[i].features;
      targets[i] = state[i].targets;
    }
    fit = glm_fit(config.divergence, feats, targets, config.C, config.glm,
                  &fit.w, &fit.beta);

    trace.substeps.push_back({after_a, after_b, fit.objective});
    trace.rows.push_back(
        {iter, fit.objective, after_a, perm_changes, elapsed_seconds(it0)});

    const double rel = (prev_obj - fit.objective) / std::max(1.0, std::abs(prev_obj));
    prev_obj = fit.objective;
    if (rel < config.outer_tol) {
      trace.converged = true;
      break;
    }
  }

  return {finalize_model(config, train, fit), std::move(trace)};
}

TrainResult train_baseline(const TrainConfig& config, const Dataset& train) {
  check_training_data(train);
  const size_t nq = train.queries.size();
  std::vector<Eigen::MatrixXd> feats(nq);
  std::vector<Eigen::VectorXd> targets(nq);
  for (size_t i = 0; i < nq; ++i) {
    feats[i] = train.queries[i].features;
    targets[i] = baseline_targets(config.divergence, train.queries[i].grades);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult fit =
      glm_fit(config.divergence, feats, targets, config.C, config.glm);
  TrainTrace trace;
  trace.rows.push_back({0, fit.objective, fit.objective, 0, elapsed_seconds(t0)});
  trace.converged = fit.converged;
  return {finalize_model(config, train, fit), std::move(trace)};
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot open for writing: " + path);
  out.precision(17);
  out << "iter,objective,retarget_obj,perm_changes,seconds\n";
  for (const TraceRow& row : trace.rows) {
    out << row.iter << ',' << row.objective << ',' << row.retarget_obj << ','
        << row.perm_changes << ',' << row.seconds << "\n";
  }
}

}  // namespace bregrank
