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
#include "bregrank/divergence.hpp"

#include <cmath>

namespace bregrank {

namespace {

constexpr double kSimplexTol = 1e-9;
// Largest exponent exp() evaluates without overflow.
constexpr double kExpClamp = 709.0;
// Log arguments for the shifted potential are clamped this far above the
// domain boundary so that exact boundary points evaluate finitely.
constexpr double kGiBoundaryEps = 1e-12;

double clamped_exp(double t) { return std::exp(t < kExpClamp ? t : kExpClamp); }

void check_simplex(const Eigen::VectorXd& x, const char* who) {
  if ((x.array() < -kSimplexTol).any() || std::abs(x.sum() - 1.0) > kSimplexTol) {
    throw DomainViolation(std::string(who) + ": point is not on the simplex");
  }
}

void check_gi(const Eigen::VectorXd& x, double shift, const char* who) {
  if ((x.array() < shift - kSimplexTol).any()) {
    throw DomainViolation(std::string(who) + ": entries must be >= the domain shift");
  }
}

double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace

DivergenceSpec::DivergenceSpec(DivergenceKind kind, Eigen::VectorXd weights)
    : kind_(kind), weights_(std::move(weights)) {
  if ((weights_.array() <= 0.0).any()) {
    throw DomainViolation("divergence weights must be strictly positive");
  }
}

DivergenceSpec DivergenceSpec::squared(Eigen::VectorXd weights) {
  return DivergenceSpec(DivergenceKind::SquaredEuclidean, std::move(weights));
}

DivergenceSpec DivergenceSpec::kl_simplex(Eigen::VectorXd weights) {
  return DivergenceSpec(DivergenceKind::KLSimplex, std::move(weights));
}

DivergenceSpec DivergenceSpec::shifted_gi(Eigen::VectorXd weights) {
  return DivergenceSpec(DivergenceKind::ShiftedGI, std::move(weights));
}

DivergenceSpec DivergenceSpec::make(DivergenceKind kind, Eigen::VectorXd weights) {
  return DivergenceSpec(kind, std::move(weights));
}

DivergenceSpec DivergenceSpec::head(Eigen::Index d) const {
  if (unit_weights()) return *this;
  if (weights_.size() < d) {
    throw DimensionMismatch("divergence weights shorter than requested dimension");
  }
  return DivergenceSpec(kind_, weights_.head(d));
}

void DivergenceSpec::check_dim(Eigen::Index d) const {
  if (!unit_weights() && weights_.size() != d) {
    throw DimensionMismatch("divergence weights do not match vector dimension");
  }
}

std::string to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::SquaredEuclidean:
      return "squared";
    case DivergenceKind::KLSimplex:
      return "kl";
    case DivergenceKind::ShiftedGI:
      return "gi";
  }
  return "unknown";
}

double eval_phi(const DivergenceSpec& spec, const Eigen::VectorXd& x) {
  spec.check_dim(x.size());
  double out = 0.0;
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        out += 0.5 * spec.weight(i) * x[i] * x[i];
      }
      return out;
    case DivergenceKind::KLSimplex:
      check_simplex(x, "eval_phi");
      for (Eigen::Index i = 0; i < x.size(); ++i) out += spec.weight(i) * xlogx(x[i]);
      return out;
    case DivergenceKind::ShiftedGI:
      check_gi(x, spec.gi_shift(), "eval_phi");
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double u = std::max(x[i] - spec.gi_shift(), 0.0);
        out += spec.weight(i) * (xlogx(u) - x[i]);
      }
      return out;
  }
  return out;
}

double eval_psi(const DivergenceSpec& spec, const Eigen::VectorXd& s) {
  spec.check_dim(s.size());
  const Eigen::Index d = s.size();
  double out = 0.0;
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      for (Eigen::Index i = 0; i < d; ++i) out += 0.5 * s[i] * s[i] / spec.weight(i);
      return out;
    case DivergenceKind::KLSimplex: {
      if (d == 0) throw DimensionMismatch("eval_psi: empty vector");
      double m = s[0] / spec.weight(0);
      for (Eigen::Index i = 1; i < d; ++i) m = std::max(m, s[i] / spec.weight(i));
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) acc += std::exp(s[i] / spec.weight(i) - m);
      return m + std::log(acc);
    }
    case DivergenceKind::ShiftedGI:
      for (Eigen::Index i = 0; i < d; ++i) {
        const double w = spec.weight(i);
        out += w * clamped_exp(s[i] / w) + s[i] + w;
      }
      return out;
  }
  return out;
}

Eigen::VectorXd forward_map(const DivergenceSpec& spec, const Eigen::VectorXd& x) {
  spec.check_dim(x.size());
  Eigen::VectorXd out(x.size());
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = spec.weight(i) * x[i];
      return out;
    case DivergenceKind::KLSimplex:
      check_simplex(x, "forward_map");
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0) {
          throw DomainViolation("forward_map: zero entry on the simplex boundary");
        }
        out[i] = spec.weight(i) * std::log(x[i]);
      }
      return out;
    case DivergenceKind::ShiftedGI:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] <= spec.gi_shift()) {
          throw DomainViolation("forward_map: entry at or below the domain shift");
        }
        out[i] = spec.weight(i) * std::log(x[i] - spec.gi_shift());
      }
      return out;
  }
  return out;
}

Eigen::VectorXd backward_map(const DivergenceSpec& spec, const Eigen::VectorXd& s) {
  spec.check_dim(s.size());
  const Eigen::Index d = s.size();
  Eigen::VectorXd out(d);
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      for (Eigen::Index i = 0; i < d; ++i) out[i] = s[i] / spec.weight(i);
      return out;
    case DivergenceKind::KLSimplex: {
      if (d == 0) throw DimensionMismatch("backward_map: empty vector");
      double m = s[0] / spec.weight(0);
      for (Eigen::Index i = 1; i < d; ++i) m = std::max(m, s[i] / spec.weight(i));
      double z = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        out[i] = std::exp(s[i] / spec.weight(i) - m);
        z += out[i];
      }
      out /= z;
      return out;
    }
    case DivergenceKind::ShiftedGI:
      for (Eigen::Index i = 0; i < d; ++i) {
        out[i] = spec.gi_shift() + clamped_exp(s[i] / spec.weight(i));
      }
      return out;
  }
  return out;
}

double bregman_div(const DivergenceSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  spec.check_dim(x.size());
  if (x.size() != y.size()) throw DimensionMismatch("bregman_div: sizes differ");
  double out = 0.0;
  switch (spec.kind()) {
    case DivergenceKind::SquaredEuclidean:
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        out += 0.5 * spec.weight(i) * diff * diff;
      }
      return out;
    case DivergenceKind::KLSimplex:
      check_simplex(x, "bregman_div");
      check_simplex(y, "bregman_div");
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (y[i] <= 0.0) {
          throw DomainViolation("bregman_div: second argument on the simplex boundary");
        }
        if (x[i] > 0.0) out += spec.weight(i) * x[i] * std::log(x[i] / y[i]);
        // The linear term vanishes for unit weights on the simplex but is
        // required for nonnegativity under general weights.
        out += spec.weight(i) * (y[i] - x[i]);
      }
      return out;
    case DivergenceKind::ShiftedGI:
      check_gi(x, spec.gi_shift(), "bregman_div");
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double u = std::max(x[i] - spec.gi_shift(), kGiBoundaryEps);
        const double v = y[i] - spec.gi_shift();
        if (v <= 0.0) {
          throw DomainViolation("bregman_div: second argument at or below the shift");
        }
        if (x[i] - spec.gi_shift() > kGiBoundaryEps) {
          out += spec.weight(i) * (u * std::log(u / v));
        }
        out += spec.weight(i) * (y[i] - x[i]);
      }
      return out;
  }
  return out;
}

Eigen::VectorXd link_residual(const DivergenceSpec& spec, const Eigen::VectorXd& r,
                              const Eigen::VectorXd& theta) {
  spec.check_dim(theta.size());
  if (r.size() != theta.size()) throw DimensionMismatch("link_residual: sizes differ");
  Eigen::VectorXd mu = backward_map(spec, theta);
  if (spec.kind() == DivergenceKind::KLSimplex && !spec.unit_weights()) {
    // d/dtheta_j of bregman_div(r, mu(theta)) with mu = softmax(theta ./ w);
    // the chain rule through the normalizer leaves <w,.> couplings behind.
    double wr = 0.0;
    double wmu = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      wr += spec.weight(i) * r[i];
      wmu += spec.weight(i) * mu[i];
    }
    Eigen::VectorXd out(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      out[i] = mu[i] * (wr - wmu) / spec.weight(i) + mu[i] - r[i];
    }
    return out;
  }
  return mu - r;
}

}  // namespace bregrank
