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
#ifndef BREGRANK_MRTRAIN_HPP_
#define BREGRANK_MRTRAIN_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bregrank/divergence.hpp"
#include "bregrank/glm.hpp"
#include "bregrank/isotonic.hpp"
#include "bregrank/letordata.hpp"
#include "bregrank/projector.hpp"

namespace bregrank {

// Rank-target update rule. Auto picks the exact path for the divergence:
// the descending-simplex projection for the squared kind and the
// order-projection composed with the inverse link for the others. Inner is
// the iterative simplex-coordinates solver, available for every kind.
enum class RetargetPath { Auto, DualMap, Inner, SquaredSimplex };

RetargetPath resolve_retarget(RetargetPath path, DivergenceKind kind);

struct TrainConfig {
  DivergenceSpec divergence;
  double C = 0.0;
  bool normalized = true;  // 1/d_i query-length factors in the objective
  RetargetPath retarget = RetargetPath::Auto;
  double outer_tol = 1e-6;  // relative objective decrease across iterations
  int max_outer = 200;
  FitOptions glm;             // inner model-fit tolerances
  InnerStepControl inner;     // line search for the Inner retarget path
  double inner_tol = 1e-9;
  int inner_max_iter = 2000;
  // Pass-throughs for callers that post-process targets with the projection
  // solver: step combination rule and the strict-order margin.
  UpdateMode parallel_combine = UpdateMode::Sequential;
  double margin = 1e-6;
  std::uint64_t seed = 0;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;      // after the model refit
  double retarget_obj = 0.0;   // after the retarget step
  int perm_changes = 0;        // slots reassigned by the permutation step
  double seconds = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  // Objective after each substep (retarget, permute, refit) per iteration;
  // row 0 (the bootstrap fit) has no substeps.
  std::vector<std::array<double, 3>> substeps;
  bool converged = false;
};

struct TrainResult {
  Model model;
  TrainTrace trace;
};

/// Gain-normalized fixed regression targets for one query in document
/// order: (2^g - 1) normalized to unit sum, uniform when every grade is
/// zero, then shifted into the divergence domain where required.
Eigen::VectorXd baseline_targets(const DivergenceSpec& spec,
                                 const Eigen::VectorXi& grades);

/// Starting targets for the alternating loop, in slot order (grades
/// descending). Grade-consistent and feasible: descending, on the simplex
/// for the simplex-domain kinds (smoothed away from the boundary where the
/// dual map needs interior points), shifted for the shifted kind.
Eigen::VectorXd initial_targets(const DivergenceSpec& spec,
                                const Eigen::VectorXi& grades_desc);

/// Alternating minimization: bootstrap model fit on the initial targets,
/// then per iteration (a) retarget each query from its current scores,
/// (b) re-sort documents within grade blocks by score, (c) refit the model
/// warm-started. Every substep leaves the objective no larger. Stops on
/// relative objective decrease below outer_tol or after max_outer
/// iterations (converged=false then; the best model is still returned).
TrainResult train_mr(const TrainConfig& config, const Dataset& train);

/// One model fit against the fixed gain-normalized targets; no retargeting,
/// no permutation. The reference point MR must not lose to.
TrainResult train_baseline(const TrainConfig& config, const Dataset& train);

/// CSV rows `iter,objective,retarget_obj,perm_changes,seconds`.
void write_trace_csv(const TrainTrace& trace, const std::string& path);

}  // namespace bregrank

#endif  // BREGRANK_MRTRAIN_HPP_
