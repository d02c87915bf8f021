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
#ifndef BREGRANK_ISOTONIC_HPP_
#define BREGRANK_ISOTONIC_HPP_

#include <Eigen/Core>

#include "bregrank/divergence.hpp"
#include "bregrank/ordercone.hpp"

namespace bregrank {

/// One retargeting step: the feasible target vector nearest (in the active
/// divergence) to the current model predictions.
struct RetargetResult {
  /// Descending target vector inside the feasible set.
  Eigen::VectorXd r;
  /// Simplex coordinates with r = T x (or r = shift + T x); populated only
  /// by the inner-representation path.
  Eigen::VectorXd x;
  /// Divergence value at r.
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Weighted least squares fit under a descending constraint:
/// argmin_z sum_i w_i (z_i - y_i)^2 with z_1 >= z_2 >= ... >= z_d.
/// Pool adjacent violators with an O(d) merge stack; pooled segments carry
/// their weighted means, and distinct segment values strictly decrease.
/// Empty weights mean unit weights.
Eigen::VectorXd pav_descending(const Eigen::VectorXd& y,
                               const Eigen::VectorXd& weights = {});

/// Retargeting through the conjugate pair: the minimizer of
/// D(r || backward_map(scores)) over descending r in the domain is
/// backward_map applied to the isotonic fit of the scores. Valid for the
/// kinds whose conjugate has full domain (KL and shifted GI). Non-uniform
/// weights run the isotonic fit in the per-coordinate dual scale s_i / w_i,
/// which keeps the output descending and is exact for shifted GI.
RetargetResult retarget_dualmap(const DivergenceSpec& spec,
                                const Eigen::VectorXd& scores,
                                const Eigen::VectorXd& weights = {});

/// Euclidean projection onto the probability simplex (sort and threshold).
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y);

/// Projection onto the descending part of the simplex for the squared
/// divergence, computed by Dykstra alternation between the descending cone
/// (isotonic fit) and the simplex. Plain alternating projection without the
/// correction terms lands on the intersection but not on the projection.
RetargetResult retarget_squared_simplex(const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& weights = {},
                                        double tol = 1e-9, int max_iter = 10000);

struct InnerStepControl {
  double init_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

/// Retargeting in simplex coordinates: minimize D(T x || backward(scores))
/// over x on the simplex (the shifted GI domain uses r = 1 + T x) with
/// multiplicative updates x <- x .* exp(-eta grad) / Z and a backtracking
/// line search. The gradient is the adjoint basis product of
/// forward_map(T x) - scores, evaluated with O(d) prefix sums. Stops when
/// the relative objective decrease falls below tol. warm_x, when given,
/// seeds the iteration (it must be interior simplex coordinates).
RetargetResult retarget_inner(const DivergenceSpec& spec,
                              const Eigen::VectorXd& scores,
                              InnerStepControl ctl = {}, double tol = 1e-9,
                              int max_iter = 10000,
                              const Eigen::VectorXd* warm_x = nullptr);

}  // namespace bregrank

#endif  // BREGRANK_ISOTONIC_HPP_
