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
#ifndef BREGRANK_DIVERGENCE_HPP_
#define BREGRANK_DIVERGENCE_HPP_

#include <Eigen/Core>
#include <string>

#include "bregrank/errors.hpp"

namespace bregrank {

/// Weighted separable convex potentials phi(x) = sum_i w_i phi_s(x_i)
/// (KL is additionally restricted to the probability simplex). Each kind
/// carries closed forms for the potential, its convex conjugate, the
/// gradient pair linking primal and dual coordinates, and the induced
/// Bregman divergence D(x || y) = phi(x) - phi(y) - <grad phi(y), x - y>.
///
///   SquaredEuclidean  phi_s(t) = t^2 / 2            on R
///   KLSimplex         phi_s(t) = t log t            on the simplex
///   ShiftedGI         phi_s(t) = (t-1)log(t-1) - t  on t > 1
enum class DivergenceKind { SquaredEuclidean, KLSimplex, ShiftedGI };

class DivergenceSpec {
 public:
  /// Defaults to the unit-weight squared potential.
  DivergenceSpec() = default;

  static DivergenceSpec squared(Eigen::VectorXd weights = {});
  static DivergenceSpec kl_simplex(Eigen::VectorXd weights = {});
  static DivergenceSpec shifted_gi(Eigen::VectorXd weights = {});
  static DivergenceSpec make(DivergenceKind kind, Eigen::VectorXd weights = {});

  DivergenceKind kind() const { return kind_; }
  /// Empty means unit weights for any dimension.
  const Eigen::VectorXd& weights() const { return weights_; }
  bool unit_weights() const { return weights_.size() == 0; }
  double weight(Eigen::Index i) const {
    return unit_weights() ? 1.0 : weights_[i];
  }
  /// Domain shift of the ShiftedGI potential. Fixed at 1.
  double gi_shift() const { return 1.0; }

  /// Spec restricted to the first d coordinates. Identity when weights are
  /// uniform; otherwise requires at least d stored weights.
  DivergenceSpec head(Eigen::Index d) const;

  /// Throws DimensionMismatch unless the weights cover dimension d.
  void check_dim(Eigen::Index d) const;

 private:
  DivergenceSpec(DivergenceKind kind, Eigen::VectorXd weights);

  DivergenceKind kind_ = DivergenceKind::SquaredEuclidean;
  Eigen::VectorXd weights_;
};

std::string to_string(DivergenceKind kind);

/// Potential value phi(x). Throws DomainViolation when x is outside the
/// (closed) domain: anything for squared, the simplex with nonnegative
/// entries for KL, componentwise >= 1 for shifted GI. Boundary log terms
/// use the 0 log 0 = 0 convention.
double eval_phi(const DivergenceSpec& spec, const Eigen::VectorXd& x);

/// Conjugate value psi(s), finite for every real s:
///   squared  sum_i s_i^2 / (2 w_i)
///   KL       log sum_i exp(s_i / w_i), computed with a max shift
///   GI       sum_i (w_i exp(s_i / w_i) + s_i + w_i)
double eval_psi(const DivergenceSpec& spec, const Eigen::VectorXd& s);

/// Gradient map into dual coordinates. Componentwise w_i x_i for squared,
/// w_i log x_i for KL (the constant gauge term is dropped), and
/// w_i log(x_i - 1) for shifted GI. Throws DomainViolation on boundary
/// points where the log is undefined.
Eigen::VectorXd forward_map(const DivergenceSpec& spec, const Eigen::VectorXd& x);

/// Inverse gradient map back into the primal domain: s_i / w_i for squared,
/// softmax(s ./ w) for KL, 1 + exp(s_i / w_i) for shifted GI. Total on R^d;
/// exponents are clamped at 709 against overflow. Inverts forward_map and
/// preserves the componentwise order of s at unit weights.
Eigen::VectorXd backward_map(const DivergenceSpec& spec, const Eigen::VectorXd& s);

/// Divergence value from the closed form. Requires x in the domain and y in
/// its interior. Nonnegative, zero iff x == y.
double bregman_div(const DivergenceSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

/// Gradient of theta -> bregman_div(spec, r, backward_map(spec, theta)).
/// Equals backward_map(theta) - r except for weighted KL, where the simplex
/// coupling contributes a <w, r> factor.
Eigen::VectorXd link_residual(const DivergenceSpec& spec, const Eigen::VectorXd& r,
                              const Eigen::VectorXd& theta);

}  // namespace bregrank

#endif  // BREGRANK_DIVERGENCE_HPP_
