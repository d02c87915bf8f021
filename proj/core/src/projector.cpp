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
#include "bregrank/projector.hpp"

#include <cmath>
#include <limits>

namespace bregrank {

namespace {

constexpr double kRowTol = 1e-12;
constexpr int kMaxDoublings = 200;
constexpr int kMaxBisections = 500;
constexpr int kMaxProximal = 1000;

// Potential over [divergence variables | auxiliary variables]. The
// auxiliary part carries 1/2 ||s - center||^2, so its gradient pair is a
// shift by the center.
struct Geometry {
  const DivergenceSpec* spec;
  Eigen::Index dim;
  Eigen::Index aux;
  Eigen::VectorXd center;

  Eigen::Index total() const { return dim + aux; }

  Eigen::VectorXd forward(const Eigen::VectorXd& z) const {
    Eigen::VectorXd g(total());
    g.head(dim) = forward_map(*spec, z.head(dim));
    if (aux > 0) g.tail(aux) = z.tail(aux) - center;
    return g;
  }

  Eigen::VectorXd backward(const Eigen::VectorXd& g) const {
    Eigen::VectorXd z(total());
    z.head(dim) = backward_map(*spec, g.head(dim));
    if (aux > 0) z.tail(aux) = g.tail(aux) + center;
    return z;
  }

  bool quadratic() const {
    return spec->kind() == DivergenceKind::SquaredEuclidean;
  }

  double quad_weight(Eigen::Index i) const {
    return i < dim ? spec->weight(i) : 1.0;
  }
};

// Dual step c with <a, backward(g + c a)> = b. The inner product is
// nondecreasing in c, so a sign change brackets the root.
double row_step(const Geometry& geom, const Eigen::VectorXd& g,
                const Eigen::VectorXd& a, double b) {
  if (geom.quadratic()) {
    double denom = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      denom += a[i] * a[i] / geom.quad_weight(i);
    }
    const double gap = b - a.dot(geom.backward(g));
    if (denom <= 0.0) {
      if (std::abs(gap) <= kRowTol) return 0.0;
      throw BracketFailure("halfspace row has a zero normal");
    }
    return gap / denom;
  }
  const auto h = [&](double c) {
    return a.dot(geom.backward(g + c * a)) - b;
  };
  const double h0 = h(0.0);
  if (std::abs(h0) <= kRowTol) return 0.0;
  double lo = 0.0, hi = 0.0;
  if (h0 > 0.0) {
    double step = 1.0;
    int n = 0;
    for (lo = -step; h(lo) > 0.0; lo = -step) {
      step *= 2.0;
      if (++n > kMaxDoublings) {
        throw BracketFailure("halfspace target not reachable (low)");
      }
    }
    hi = lo == -1.0 ? 0.0 : lo * 0.5;
  } else {
    double step = 1.0;
    int n = 0;
    for (hi = step; h(hi) < 0.0; hi = step) {
      step *= 2.0;
      if (++n > kMaxDoublings) {
        throw BracketFailure("halfspace target not reachable (high)");
      }
    }
    lo = hi == 1.0 ? 0.0 : hi * 0.5;
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxBisections; ++it) {
    mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm) <= kRowTol) return mid;
    (hm > 0.0 ? hi : lo) = mid;
    if (hi - lo <= std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(lo), std::abs(hi)})) {
      break;
    }
  }
  return mid;
}

double system_residual(const LinearSystem& system, const Eigen::VectorXd& z) {
  double res = 0.0;
  for (const LinearRow& row : system.rows) {
    const double gap = row.a.dot(z) - row.b;
    res = std::max(res, row.equality ? std::abs(gap) : gap);
  }
  return std::max(res, 0.0);
}

// One pass of the row-action updates; returns the largest applied |c|.
double run_sweep(const Geometry& geom, const LinearSystem& system,
                 UpdateMode mode, Eigen::VectorXd& g, Eigen::VectorXd& z,
                 Eigen::VectorXd& lambda) {
  const int m = static_cast<int>(system.rows.size());
  double max_step = 0.0;
  if (mode == UpdateMode::Sequential) {
    for (int i = 0; i < m; ++i) {
      const LinearRow& row = system.rows[static_cast<size_t>(i)];
      // Satisfied rows with a zero multiplier have nothing to undo.
      if (!row.equality && lambda[i] <= 0.0 && row.a.dot(z) - row.b <= kRowTol) {
        continue;
      }
      double c = row_step(geom, g, row.a, row.b);
      if (!row.equality) c = std::min(c, lambda[i]);
      if (c == 0.0) continue;
      g += c * row.a;
      lambda[i] -= c;
      z = geom.backward(g);
      max_step = std::max(max_step, std::abs(c));
    }
  } else {
    Eigen::VectorXd steps = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      const LinearRow& row = system.rows[static_cast<size_t>(i)];
      if (!row.equality && lambda[i] <= 0.0 && row.a.dot(z) - row.b <= kRowTol) {
        continue;
      }
      double c = row_step(geom, g, row.a, row.b) / static_cast<double>(m);
      if (!row.equality) c = std::min(c, lambda[i]);
      steps[i] = c;
    }
    for (int i = 0; i < m; ++i) {
      if (steps[i] == 0.0) continue;
      g += steps[i] * system.rows[static_cast<size_t>(i)].a;
      lambda[i] -= steps[i];
      max_step = std::max(max_step, std::abs(steps[i]));
    }
    z = geom.backward(g);
  }
  return max_step;
}

}  // namespace

std::pair<Eigen::VectorXd, double> halfspace_project(const DivergenceSpec& spec,
                                                     const Eigen::VectorXd& z,
                                                     const Eigen::VectorXd& a,
                                                     double b) {
  if (a.size() != z.size()) throw DimensionMismatch("halfspace_project: sizes");
  const Geometry geom{&spec, z.size(), 0, Eigen::VectorXd()};
  const Eigen::VectorXd g = geom.forward(z);
  const double c = row_step(geom, g, a, b);
  return {c == 0.0 ? z : geom.backward(g + c * a), c};
}

SolverState bregman_solve(const DivergenceSpec& spec, const Eigen::VectorXd& y,
                          const LinearSystem& system, UpdateMode mode,
                          double tol, int max_iter) {
  if (system.dim != y.size()) {
    throw DimensionMismatch("bregman_solve: system dimension");
  }
  for (const LinearRow& row : system.rows) {
    if (row.a.size() != system.total()) {
      throw DimensionMismatch("bregman_solve: row width");
    }
  }
  const int m = static_cast<int>(system.rows.size());
  SolverState state;
  state.lambda = Eigen::VectorXd::Zero(m);

  Geometry geom{&spec, system.dim, system.aux_count,
                Eigen::VectorXd::Zero(system.aux_count)};
  Eigen::VectorXd y_full(system.total());
  y_full.head(system.dim) = y;
  y_full.tail(system.aux_count) = geom.center;

  Eigen::VectorXd z;
  bool inner_converged = false;
  int prox_rounds = system.aux_count > 0 ? kMaxProximal : 1;
  for (int prox = 0; prox < prox_rounds; ++prox) {
    y_full.tail(system.aux_count) = geom.center;
    Eigen::VectorXd g = geom.forward(y_full) -
                        [&] {
                          Eigen::VectorXd acc =
                              Eigen::VectorXd::Zero(system.total());
                          for (int i = 0; i < m; ++i) {
                            acc += state.lambda[i] *
                                   system.rows[static_cast<size_t>(i)].a;
                          }
                          return acc;
                        }();
    z = geom.backward(g);
    inner_converged = false;
    while (state.iterations < max_iter) {
      const double max_step =
          run_sweep(geom, system, mode, g, z, state.lambda);
      ++state.iterations;
      state.residual = system_residual(system, z);
      state.residual_history.push_back(state.residual);
      if (state.residual <= tol && max_step < tol) {
        inner_converged = true;
        break;
      }
    }
    if (system.aux_count == 0) break;
    const Eigen::VectorXd aux_now = z.tail(system.aux_count);
    const double moved = (aux_now - geom.center).lpNorm<Eigen::Infinity>();
    geom.center = aux_now;
    if (moved < tol) break;
    if (!inner_converged) break;  // iteration budget exhausted
  }

  state.z = z.head(system.dim);
  state.aux = z.tail(system.aux_count);
  state.converged = inner_converged;
  return state;
}

LinearSystem order_constraints(Eigen::Index d) {
  LinearSystem sys;
  sys.dim = d;
  for (Eigen::Index j = 0; j + 1 < d; ++j) {
    LinearRow row;
    row.a = Eigen::VectorXd::Zero(d);
    row.a[j] = -1.0;
    row.a[j + 1] = 1.0;
    row.b = 0.0;
    sys.rows.push_back(std::move(row));
  }
  return sys;
}

LinearSystem block_order_constraints(const BlockPartition& partition,
                                     double margin) {
  partition.validate();
  const Eigen::Index d = partition.size();
  const Eigen::Index k = static_cast<Eigen::Index>(partition.blocks.size());
  LinearSystem sys;
  sys.dim = d;
  sys.aux_count = k - 1;
  Eigen::Index offset = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index len =
        static_cast<Eigen::Index>(partition.blocks[static_cast<size_t>(j)].size());
    for (Eigen::Index s = offset; s < offset + len; ++s) {
      if (j > 0) {
        // Slot below the separator above its block: r_s <= sep_{j-1} - margin.
        LinearRow row;
        row.a = Eigen::VectorXd::Zero(sys.total());
        row.a[s] = 1.0;
        row.a[d + j - 1] = -1.0;
        row.b = -margin;
        sys.rows.push_back(std::move(row));
      }
      if (j + 1 < k) {
        // Slot above the separator below its block: sep_j <= r_s - margin.
        LinearRow row;
        row.a = Eigen::VectorXd::Zero(sys.total());
        row.a[s] = -1.0;
        row.a[d + j] = 1.0;
        row.b = -margin;
        sys.rows.push_back(std::move(row));
      }
    }
    offset += len;
  }
  return sys;
}

}  // namespace bregrank
