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
#include "bregrank/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bregrank {

namespace {

struct Pool {
  double wsum;
  double wysum;
  Eigen::Index len;
  double value() const { return wysum / wsum; }
};

// Weighted Euclidean projection onto the simplex: x_i = max(y_i - t / w_i, 0)
// with t chosen so the result sums to one. The residual sum is strictly
// decreasing in t wherever it is positive, so bisection applies.
Eigen::VectorXd project_simplex_weighted(const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& w) {
  const auto mass = [&](double t) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += std::max(y[i] - t / w[i], 0.0);
    return s;
  };
  double lo = 0.0, hi = 0.0, step = 1.0;
  while (mass(lo) < 1.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e300) throw BracketFailure("simplex projection bracket (low)");
  }
  step = 1.0;
  while (mass(hi) > 1.0) {
    hi += step;
    step *= 2.0;
    if (step > 1e300) throw BracketFailure("simplex projection bracket (high)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) >= 1.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = std::max(y[i] - t / w[i], 0.0);
  const double s = out.sum();
  if (s > 0.0) out /= s;  // absorb bisection residue
  return out;
}

}  // namespace

Eigen::VectorXd pav_descending(const Eigen::VectorXd& y,
                               const Eigen::VectorXd& weights) {
  const Eigen::Index d = y.size();
  if (weights.size() != 0 && weights.size() != d) {
    throw DimensionMismatch("pav_descending: weight vector size");
  }
  if (weights.size() != 0 && (weights.array() <= 0.0).any()) {
    throw DomainViolation("pav_descending: weights must be positive");
  }
  std::vector<Pool> pools;
  pools.reserve(static_cast<size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = weights.size() ? weights[i] : 1.0;
    pools.push_back({w, w * y[i], 1});
    // A later pool exceeding an earlier one violates the descending order;
    // pooled segments take their weighted mean.
    while (pools.size() >= 2 &&
           pools[pools.size() - 1].value() > pools[pools.size() - 2].value()) {
      Pool top = pools.back();
      pools.pop_back();
      pools.back().wsum += top.wsum;
      pools.back().wysum += top.wysum;
      pools.back().len += top.len;
    }
  }
  Eigen::VectorXd out(d);
  Eigen::Index at = 0;
  for (const Pool& p : pools) {
    for (Eigen::Index k = 0; k < p.len; ++k) out[at++] = p.value();
  }
  return out;
}

RetargetResult retarget_dualmap(const DivergenceSpec& spec,
                                const Eigen::VectorXd& scores,
                                const Eigen::VectorXd& weights) {
  if (spec.kind() == DivergenceKind::SquaredEuclidean) {
    throw Error("retarget_dualmap: squared kind uses the simplex path");
  }
  spec.check_dim(scores.size());
  if (weights.size() != 0 && weights.size() != scores.size()) {
    throw DimensionMismatch("retarget_dualmap: weight vector size");
  }
  RetargetResult res;
  if (spec.unit_weights() && weights.size() == 0) {
    res.r = backward_map(spec, pav_descending(scores));
  } else {
    // Explicit weights override the spec's own; either way the isotonic fit
    // must pool in the dual scale of the same weights the backward map uses.
    Eigen::VectorXd w(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      w[i] = weights.size() ? weights[i] : spec.weight(i);
    }
    Eigen::VectorXd scaled(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) scaled[i] = scores[i] / w[i];
    Eigen::VectorXd fit = pav_descending(scaled, w);
    res.r = backward_map(spec, w.cwiseProduct(fit));
  }
  res.objective = bregman_div(spec, res.r, backward_map(spec, scores));
  res.iterations = 1;
  res.converged = true;
  return res;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& y) {
  const Eigen::Index d = y.size();
  if (d == 0) throw DimensionMismatch("project_simplex: empty vector");
  std::vector<double> u(y.data(), y.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    css += u[static_cast<size_t>(j)];
    const double cand = (css - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - cand > 0.0) theta = cand;
  }
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = std::max(y[i] - theta, 0.0);
  return out;
}

RetargetResult retarget_squared_simplex(const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& weights,
                                        double tol, int max_iter) {
  const Eigen::Index d = y.size();
  if (weights.size() != 0 && weights.size() != d) {
    throw DimensionMismatch("retarget_squared_simplex: weight vector size");
  }
  const bool unit = weights.size() == 0;
  RetargetResult res;
  Eigen::VectorXd x = y;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(d);
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd cone = pav_descending(x + p, weights);
    p = x + p - cone;
    const Eigen::VectorXd next =
        unit ? project_simplex(cone + q) : project_simplex_weighted(cone + q, weights);
    q = cone + q - next;
    const double delta = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (delta < tol && is_descending(x, 1e-8)) {
      converged = true;
      ++it;
      break;
    }
  }
  // Snap onto the cone exactly; the alternation stops within tol of it.
  // Pooling keeps entries nonnegative and the rescale restores the unit sum.
  x = pav_descending(x, weights);
  if (const double total = x.sum(); total > 0.0) x /= total;
  res.r = x;
  double obj = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = unit ? 1.0 : weights[i];
    obj += 0.5 * w * (x[i] - y[i]) * (x[i] - y[i]);
  }
  res.objective = obj;
  res.iterations = it;
  res.converged = converged;
  return res;
}

RetargetResult retarget_inner(const DivergenceSpec& spec,
                              const Eigen::VectorXd& scores, InnerStepControl ctl,
                              double tol, int max_iter,
                              const Eigen::VectorXd* warm_x) {
  const Eigen::Index d = scores.size();
  spec.check_dim(d);
  if (d == 0) throw DimensionMismatch("retarget_inner: empty scores");
  const double shift =
      spec.kind() == DivergenceKind::ShiftedGI ? spec.gi_shift() : 0.0;
  const ConeBasis basis = ConeBasis::simplex(d);
  const Eigen::VectorXd mu = backward_map(spec, scores);
  // Dual image of mu. For the simplex kind the softmax normalizer shifts the
  // raw scores by w*log Z; using the shifted scores keeps the gradient exact
  // under non-unit weights (the shift is constant, hence inert, when unit).
  Eigen::VectorXd dual_ref = scores;
  if (spec.kind() == DivergenceKind::KLSimplex) {
    double m = scores[0] / spec.weight(0);
    for (Eigen::Index i = 1; i < d; ++i) m = std::max(m, scores[i] / spec.weight(i));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) acc += std::exp(scores[i] / spec.weight(i) - m);
    const double logz = m + std::log(acc);
    for (Eigen::Index i = 0; i < d; ++i) dual_ref[i] -= spec.weight(i) * logz;
  }

  Eigen::VectorXd x;
  if (warm_x != nullptr) {
    if (warm_x->size() != d) throw DimensionMismatch("retarget_inner: warm start size");
    if ((warm_x->array() <= 0.0).any()) {
      throw ConeViolation("retarget_inner: warm start must be interior");
    }
    x = *warm_x / warm_x->sum();
  } else {
    x = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  }

  const auto targets = [&](const Eigen::VectorXd& coords) -> Eigen::VectorXd {
    Eigen::VectorXd r = apply_basis(basis, coords);
    if (shift != 0.0) r.array() += shift;
    return r;
  };

  Eigen::VectorXd r = targets(x);
  double obj = bregman_div(spec, r, mu);
  RetargetResult res;
  res.converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd grad =
        apply_basis_transpose(basis, forward_map(spec, r) - dual_ref);
    // Multiplicative update with backtracking; subtracting the minimum
    // gradient entry keeps the exponent nonpositive without changing the
    // normalized iterate.
    const double gmin = grad.minCoeff();
    double eta = ctl.init_step;
    bool accepted = false;
    Eigen::VectorXd x_new(d), r_new;
    double obj_new = obj;
    while (eta > 1e-16) {
      double z = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        // Floor against exponent underflow; iterates stay interior.
        x_new[i] = std::max(x[i] * std::exp(-eta * (grad[i] - gmin)), 1e-300);
        z += x_new[i];
      }
      x_new /= z;
      const double predicted = grad.dot(x_new - x);  // <= 0 by construction
      r_new = targets(x_new);
      obj_new = bregman_div(spec, r_new, mu);
      if (obj_new <= obj + ctl.sufficient_decrease * predicted) {
        accepted = true;
        break;
      }
      eta *= ctl.shrink;
    }
    if (!accepted) {
      // No descent step exists at machine precision: stationary point.
      res.converged = true;
      break;
    }
    const double rel = (obj - obj_new) / std::max(1.0, std::abs(obj));
    x = x_new;
    r = r_new;
    obj = obj_new;
    if (rel < tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.r = r;
  res.x = x;
  res.objective = obj;
  res.iterations = it;
  return res;
}

}  // namespace bregrank
