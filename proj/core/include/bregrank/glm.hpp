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
#ifndef BREGRANK_GLM_HPP_
#define BREGRANK_GLM_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bregrank/divergence.hpp"
#include "bregrank/errors.hpp"

namespace bregrank {

// Scoring model fit: minimize over (w, beta)
//
//   sum_i n_i * D(r_i || backward_map(A_i w + beta_i 1)) + (C/2) ||w||^2
//
// where n_i = 1/d_i when `normalized` and 1 otherwise. The per-query offsets
// beta are free (unregularized) coordinates; they never affect test-time
// rankings and are kept only as a training artifact.

struct FitOptions {
  double tol = 1e-8;  // relative objective decrease between accepted steps
  int max_iter = 500;
  bool normalized = true;
};

struct FitResult {
  Eigen::VectorXd w;
  Eigen::VectorXd beta;  // one entry per query
  double objective = 0.0;
  double grad_norm = 0.0;  // Euclidean norm at the returned iterate
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;
};

/// Regularized objective value. Divergence weights, when present, are
/// positional: query i uses the first d_i of them.
double glm_objective(const DivergenceSpec& spec,
                     const std::vector<Eigen::MatrixXd>& features,
                     const std::vector<Eigen::VectorXd>& targets,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                     double C, bool normalized);

/// Analytic gradient of glm_objective; grad_beta gets one entry per query.
void glm_gradient(const DivergenceSpec& spec,
                  const std::vector<Eigen::MatrixXd>& features,
                  const std::vector<Eigen::VectorXd>& targets,
                  const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                  double C, bool normalized, Eigen::VectorXd* grad_w,
                  Eigen::VectorXd* grad_beta);

/// Monotone first-order minimization of glm_objective over (w, beta):
/// spectral-initialized steps with Armijo backtracking, so every accepted
/// step decreases the objective. Stops when the relative decrease drops
/// below opts.tol or the iterate is stationary at machine precision; hitting
/// opts.max_iter first leaves `converged` false and returns the best iterate.
/// Pass warm_w / warm_beta to resume from a previous solution.
FitResult glm_fit(const DivergenceSpec& spec,
                  const std::vector<Eigen::MatrixXd>& features,
                  const std::vector<Eigen::VectorXd>& targets, double C,
                  const FitOptions& opts = {},
                  const Eigen::VectorXd* warm_w = nullptr,
                  const Eigen::VectorXd* warm_beta = nullptr);

enum class FeatureNormMode { None, QueryMinMax };

// Feature scaling the model expects at prediction time. QueryMinMax is
// recomputed per query from the evaluated features themselves; min/max hold
// dataset-level affine stats (identity when unused) so that saved models
// state their preprocessing explicitly.
struct FeatureNorm {
  FeatureNormMode mode = FeatureNormMode::None;
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

struct Model {
  Eigen::VectorXd w;
  DivergenceSpec divergence;
  double C = 0.0;
  FeatureNorm feature_norm;
  bool normalized = true;
  std::vector<double> trained_offsets;  // training artifact, not persisted
};

/// Scores = features * w. Features must already carry the model's
/// normalization; offsets are deliberately absent (they cannot change a
/// within-query ranking).
Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& features);

/// Versioned JSON persistence. trained_offsets are dropped on save.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

std::string to_string(FeatureNormMode mode);
FeatureNormMode feature_norm_mode_from_string(const std::string& name);

}  // namespace bregrank

#endif  // BREGRANK_GLM_HPP_
