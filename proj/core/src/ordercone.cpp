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
#include "bregrank/ordercone.hpp"

#include <cmath>

namespace bregrank {

namespace {
constexpr double kSimplexTol = 1e-9;
constexpr double kOrderTol = 1e-9;
}  // namespace

ConeBasis ConeBasis::general(Eigen::Index d) {
  return ConeBasis{Eigen::VectorXd::Ones(d), ConeKind::GeneralCone};
}

ConeBasis ConeBasis::general(Eigen::VectorXd v) {
  if (v.size() == 0 || (v.array() <= 0.0).any()) {
    throw ConeViolation("cone generator must be strictly positive");
  }
  return ConeBasis{std::move(v), ConeKind::GeneralCone};
}

ConeBasis ConeBasis::simplex(Eigen::Index d) {
  Eigen::VectorXd v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = 1.0 / static_cast<double>(j + 1);
  return ConeBasis{std::move(v), ConeKind::SimplexCone};
}

Eigen::VectorXd adj_diff(const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i + 1 < d; ++i) out[i] = x[i] - x[i + 1];
  if (d > 0) out[d - 1] = x[d - 1];
  return out;
}

Eigen::VectorXd cum_sum(const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  Eigen::VectorXd out(d);
  double acc = 0.0;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    acc += x[i];
    out[i] = acc;
  }
  return out;
}

bool is_descending(const Eigen::VectorXd& x, double tol) {
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    if (x[i] < x[i + 1] - tol) return false;
  }
  return true;
}

Eigen::VectorXd apply_basis(const ConeBasis& basis, const Eigen::VectorXd& x) {
  const Eigen::Index d = basis.dim();
  if (x.size() != d) throw DimensionMismatch("apply_basis: coordinate size");
  if (basis.kind == ConeKind::SimplexCone) {
    if ((x.array() < -kSimplexTol).any() ||
        std::abs(x.sum() - 1.0) > kSimplexTol) {
      throw ConeViolation("simplex basis requires simplex coordinates");
    }
  } else {
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      if (x[i] < -kSimplexTol) {
        throw ConeViolation("general basis requires nonnegative leading coordinates");
      }
    }
  }
  // Suffix sums of v .* x.
  Eigen::VectorXd out(d);
  double acc = 0.0;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    acc += basis.v[i] * x[i];
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd cone_coords(const ConeBasis& basis, const Eigen::VectorXd& r) {
  const Eigen::Index d = basis.dim();
  if (r.size() != d) throw DimensionMismatch("cone_coords: vector size");
  if (!is_descending(r, kOrderTol)) {
    throw ConeViolation("cone_coords requires a descending vector");
  }
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i + 1 < d; ++i) out[i] = (r[i] - r[i + 1]) / basis.v[i];
  if (d > 0) out[d - 1] = r[d - 1] / basis.v[d - 1];
  return out;
}

Eigen::VectorXd apply_basis_transpose(const ConeBasis& basis,
                                      const Eigen::VectorXd& y) {
  const Eigen::Index d = basis.dim();
  if (y.size() != d) throw DimensionMismatch("apply_basis_transpose: vector size");
  Eigen::VectorXd out(d);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    acc += y[j];
    out[j] = basis.v[j] * acc;
  }
  return out;
}

}  // namespace bregrank
