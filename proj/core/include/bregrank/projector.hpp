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
#ifndef BREGRANK_PROJECTOR_HPP_
#define BREGRANK_PROJECTOR_HPP_

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "bregrank/blockperm.hpp"
#include "bregrank/divergence.hpp"

namespace bregrank {

/// One constraint <a, z> <= b (or == b when equality is set).
struct LinearRow {
  Eigen::VectorXd a;
  double b = 0.0;
  bool equality = false;
};

/// A polyhedron over dim divergence variables plus aux_count trailing
/// auxiliary variables. Auxiliary variables carry no divergence term; they
/// exist so partial orders can be written with few rows.
struct LinearSystem {
  std::vector<LinearRow> rows;
  Eigen::Index dim = 0;
  Eigen::Index aux_count = 0;

  Eigen::Index total() const { return dim + aux_count; }
};

enum class UpdateMode { Sequential, Parallel };

struct SolverState {
  /// Divergence variables (always inside the interior of the domain).
  Eigen::VectorXd z;
  /// Auxiliary variables, empty unless the system declares them.
  Eigen::VectorXd aux;
  /// Per-row multipliers; nonnegative on inequality rows, signed on
  /// equality rows.
  Eigen::VectorXd lambda;
  int iterations = 0;
  double residual = 0.0;
  /// Max constraint violation after each sweep (or synchronized round).
  std::vector<double> residual_history;
  bool converged = false;
};

/// Bregman projection of z onto the hyperplane <a, p> = b: the unique p with
/// grad phi(p) = grad phi(z) + c a and <a, p> = b. Closed form for the
/// squared kind; otherwise a monotone bisection on c with doubling bracket
/// expansion (at most 200 doublings, residual tolerance 1e-12). Returns
/// (p, c). Throws BracketFailure when b is not reachable along the row.
std::pair<Eigen::VectorXd, double> halfspace_project(const DivergenceSpec& spec,
                                                     const Eigen::VectorXd& z,
                                                     const Eigen::VectorXd& a,
                                                     double b);

/// Row-action projection of y onto the system: minimizes D(z || y) subject
/// to the rows. Maintains grad phi(z) = grad phi(y) - sum_i lambda_i a_i with
/// lambda >= 0 on inequality rows; each row step projects onto its
/// hyperplane, with the dual step capped so multipliers stay nonnegative
/// (slack rows with positive multipliers are relaxed by the same rule).
/// Sequential mode sweeps rows cyclically. Parallel mode computes every row
/// correction from the same iterate and applies the increments scaled by
/// 1 / row_count. Auxiliary variables are handled by an outer proximal loop:
/// they carry a unit quadratic potential re-centered at the previous
/// solution until they stop moving, which removes the penalty from the
/// limit. Stops when the residual and the largest dual step fall below tol.
SolverState bregman_solve(const DivergenceSpec& spec, const Eigen::VectorXd& y,
                          const LinearSystem& system,
                          UpdateMode mode = UpdateMode::Sequential,
                          double tol = 1e-8, int max_iter = 10000);

/// The descending cone as d-1 rows z_{j+1} - z_j <= 0.
LinearSystem order_constraints(Eigen::Index d);

/// Block partial order over slot coordinates with one auxiliary separator
/// per adjacent block pair: every slot of a block lies at least margin above
/// the separator below it and at least margin below the separator above it.
/// Row count is sum_j 2 |P_j| minus the sizes of the first and last blocks.
LinearSystem block_order_constraints(const BlockPartition& partition,
                                     double margin = 1e-6);

}  // namespace bregrank

#endif  // BREGRANK_PROJECTOR_HPP_
