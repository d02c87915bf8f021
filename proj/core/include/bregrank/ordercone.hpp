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
#ifndef BREGRANK_ORDERCONE_HPP_
#define BREGRANK_ORDERCONE_HPP_

#include <Eigen/Core>

#include "bregrank/errors.hpp"

namespace bregrank {

enum class ConeKind { GeneralCone, SimplexCone };

/// Generator of an upper triangular change of basis for the cone of
/// descending vectors. Row i of the implied matrix is
/// (0, ..., 0, v_i, v_{i+1}, ..., v_d) with v > 0 componentwise, so the
/// matrix image of the nonnegative orthant (last coordinate free) is
/// exactly the descending cone. Products with the matrix and its inverse
/// are evaluated as O(d) streaming sums; the matrix is never materialized.
struct ConeBasis {
  Eigen::VectorXd v;
  ConeKind kind = ConeKind::GeneralCone;

  /// All-ones generator: basis columns are descending step vectors.
  static ConeBasis general(Eigen::Index d);
  /// Custom positive generator.
  static ConeBasis general(Eigen::VectorXd v);
  /// Harmonic generator (1, 1/2, ..., 1/d): basis columns are the uniform
  /// distributions on prefixes, so simplex coordinates map into the
  /// descending part of the simplex.
  static ConeBasis simplex(Eigen::Index d);

  Eigen::Index dim() const { return v.size(); }
};

/// out_i = x_i - x_{i+1} for i < d, out_d = x_d.
Eigen::VectorXd adj_diff(const Eigen::VectorXd& x);

/// Suffix sums: out_i = sum_{j >= i} x_j. Inverse of adj_diff.
Eigen::VectorXd cum_sum(const Eigen::VectorXd& x);

/// x_i >= x_{i+1} - tol for every adjacent pair.
bool is_descending(const Eigen::VectorXd& x, double tol = 0.0);

/// r_i = sum_{j >= i} v_j x_j. Requires x_1..x_{d-1} >= 0 for a general
/// basis, or x on the simplex (tolerance 1e-9) for a simplex basis;
/// throws ConeViolation otherwise. The output is always descending.
Eigen::VectorXd apply_basis(const ConeBasis& basis, const Eigen::VectorXd& x);

/// Inverse transform: x_j = (r_j - r_{j+1}) / v_j, x_d = r_d / v_d.
/// Requires r descending (tolerance 1e-9); throws ConeViolation otherwise.
Eigen::VectorXd cone_coords(const ConeBasis& basis, const Eigen::VectorXd& r);

/// Adjoint product: out_j = v_j * sum_{i <= j} y_i (weighted prefix sums).
Eigen::VectorXd apply_basis_transpose(const ConeBasis& basis,
                                      const Eigen::VectorXd& y);

}  // namespace bregrank

#endif  // BREGRANK_ORDERCONE_HPP_
