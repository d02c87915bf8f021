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
#include "bregrank/glm.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace bregrank {

namespace {

void check_shapes(const std::vector<Eigen::MatrixXd>& features,
                  const std::vector<Eigen::VectorXd>& targets,
                  const Eigen::VectorXd& w, const Eigen::VectorXd& beta) {
  if (features.empty()) throw EmptyDataset("glm: no queries");
  if (features.size() != targets.size()) {
    throw DimensionMismatch("glm: features/targets query counts differ");
  }
  if (beta.size() != static_cast<Eigen::Index>(features.size())) {
    throw DimensionMismatch("glm: one offset per query required");
  }
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].rows() != targets[i].size()) {
      throw DimensionMismatch("glm: feature rows do not match targets");
    }
    if (features[i].cols() != w.size()) {
      throw DimensionMismatch("glm: feature width does not match w");
    }
    if (features[i].rows() == 0) throw EmptyDataset("glm: empty query");
  }
}

double query_scale(Eigen::Index rows, bool normalized) {
  return normalized ? 1.0 / static_cast<double>(rows) : 1.0;
}

}  // namespace

double glm_objective(const DivergenceSpec& spec,
                     const std::vector<Eigen::MatrixXd>& features,
                     const std::vector<Eigen::VectorXd>& targets,
                     const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                     double C, bool normalized) {
  check_shapes(features, targets, w, beta);
  double obj = 0.0;
  for (size_t i = 0; i < features.size(); ++i) {
    const Eigen::Index d = features[i].rows();
    const DivergenceSpec local = spec.head(d);
    const Eigen::VectorXd theta =
        features[i] * w + Eigen::VectorXd::Constant(d, beta[static_cast<Eigen::Index>(i)]);
    obj += query_scale(d, normalized) *
           bregman_div(local, targets[i], backward_map(local, theta));
  }
  return obj + 0.5 * C * w.squaredNorm();
}

void glm_gradient(const DivergenceSpec& spec,
                  const std::vector<Eigen::MatrixXd>& features,
                  const std::vector<Eigen::VectorXd>& targets,
                  const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                  double C, bool normalized, Eigen::VectorXd* grad_w,
                  Eigen::VectorXd* grad_beta) {
  check_shapes(features, targets, w, beta);
  grad_w->setZero(w.size());
  grad_beta->setZero(static_cast<Eigen::Index>(features.size()));
  for (size_t i = 0; i < features.size(); ++i) {
    const Eigen::Index d = features[i].rows();
    const DivergenceSpec local = spec.head(d);
    const Eigen::VectorXd theta =
        features[i] * w + Eigen::VectorXd::Constant(d, beta[static_cast<Eigen::Index>(i)]);
    const Eigen::VectorXd resid =
        query_scale(d, normalized) * link_residual(local, targets[i], theta);
    *grad_w += features[i].transpose() * resid;
    (*grad_beta)[static_cast<Eigen::Index>(i)] = resid.sum();
  }
  *grad_w += C * w;
}

FitResult glm_fit(const DivergenceSpec& spec,
                  const std::vector<Eigen::MatrixXd>& features,
                  const std::vector<Eigen::VectorXd>& targets, double C,
                  const FitOptions& opts, const Eigen::VectorXd* warm_w,
                  const Eigen::VectorXd* warm_beta) {
  if (features.empty()) throw EmptyDataset("glm_fit: no queries");
  const Eigen::Index n = features.front().cols();
  const Eigen::Index q = static_cast<Eigen::Index>(features.size());

  Eigen::VectorXd w = warm_w != nullptr ? *warm_w : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd beta =
      warm_beta != nullptr ? *warm_beta : Eigen::VectorXd::Zero(q);
  if (w.size() != n) throw DimensionMismatch("glm_fit: warm w size");
  if (beta.size() != q) throw DimensionMismatch("glm_fit: warm beta size");

  // Out-of-domain trial points (softmax underflow, exponent overflow) count
  // as +inf so the line search backs off instead of aborting.
  const auto safe_objective = [&](const Eigen::VectorXd& tw,
                                  const Eigen::VectorXd& tb) -> double {
    try {
      return glm_objective(spec, features, targets, tw, tb, C, opts.normalized);
    } catch (const DomainViolation&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  FitResult res;
  double obj = glm_objective(spec, features, targets, w, beta, C, opts.normalized);
  res.objective_history.push_back(obj);

  Eigen::VectorXd gw(n), gb(q);
  glm_gradient(spec, features, targets, w, beta, C, opts.normalized, &gw, &gb);

  Eigen::VectorXd prev_w, prev_beta, prev_gw, prev_gb;
  double step = 1.0 / (1.0 + std::sqrt(gw.squaredNorm() + gb.squaredNorm()));
  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double grad_sq = gw.squaredNorm() + gb.squaredNorm();
    if (grad_sq == 0.0) {
      res.converged = true;
      break;
    }
    // Spectral (Barzilai-Borwein) step seed from the previous move.
    if (it > 0) {
      const Eigen::VectorXd sw = w - prev_w;
      const Eigen::VectorXd sb = beta - prev_beta;
      const double sy = sw.dot(gw - prev_gw) + sb.dot(gb - prev_gb);
      const double ss = sw.squaredNorm() + sb.squaredNorm();
      if (sy > 0.0) step = std::min(std::max(ss / sy, 1e-12), 1e12);
    }
    prev_w = w;
    prev_beta = beta;
    prev_gw = gw;
    prev_gb = gb;

    double eta = step;
    bool accepted = false;
    double obj_new = obj;
    Eigen::VectorXd w_new, beta_new;
    while (eta > 1e-18) {
      w_new = w - eta * gw;
      beta_new = beta - eta * gb;
      obj_new = safe_objective(w_new, beta_new);
      if (obj_new <= obj - kArmijo * eta * grad_sq) {
        accepted = true;
        break;
      }
      eta *= kShrink;
    }
    if (!accepted) {
      // No descent direction survives at machine precision.
      res.converged = true;
      break;
    }
    w = w_new;
    beta = beta_new;
    const double rel = (obj - obj_new) / std::max(1.0, std::abs(obj));
    obj = obj_new;
    res.objective_history.push_back(obj);
    glm_gradient(spec, features, targets, w, beta, C, opts.normalized, &gw, &gb);
    if (rel < opts.tol) {
      res.converged = true;
      ++it;
      break;
    }
  }

  res.w = std::move(w);
  res.beta = std::move(beta);
  res.objective = obj;
  res.grad_norm = std::sqrt(gw.squaredNorm() + gb.squaredNorm());
  res.iterations = it;
  return res;
}

Eigen::VectorXd predict(const Model& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.w.size()) {
    throw DimensionMismatch("predict: feature width does not match model");
  }
  return features * model.w;
}

std::string to_string(FeatureNormMode mode) {
  return mode == FeatureNormMode::QueryMinMax ? "query_minmax" : "none";
}

FeatureNormMode feature_norm_mode_from_string(const std::string& name) {
  if (name == "query_minmax") return FeatureNormMode::QueryMinMax;
  if (name == "none") return FeatureNormMode::None;
  throw ParseError(0, "unknown feature normalization mode: " + name);
}

namespace {

DivergenceKind kind_from_string(const std::string& name) {
  if (name == "squared") return DivergenceKind::SquaredEuclidean;
  if (name == "kl") return DivergenceKind::KLSimplex;
  if (name == "gi") return DivergenceKind::ShiftedGI;
  throw ParseError(0, "unknown divergence kind: " + name);
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["divergence"]["kind"] = to_string(model.divergence.kind());
  doc["divergence"]["weights"] =
      std::vector<double>(model.divergence.weights().data(),
                          model.divergence.weights().data() + model.divergence.weights().size());
  doc["divergence"]["gi_shift"] = model.divergence.gi_shift();
  doc["w"] = std::vector<double>(model.w.data(), model.w.data() + model.w.size());
  doc["C"] = model.C;
  doc["feature_norm"]["mode"] = to_string(model.feature_norm.mode);
  doc["feature_norm"]["min"] = std::vector<double>(
      model.feature_norm.min.data(),
      model.feature_norm.min.data() + model.feature_norm.min.size());
  doc["feature_norm"]["max"] = std::vector<double>(
      model.feature_norm.max.data(),
      model.feature_norm.max.data() + model.feature_norm.max.size());
  doc["normalized_flag"] = model.normalized;
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("model JSON: ") + e.what());
  }
  if (doc.at("format_version").get<int>() != 1) {
    throw ParseError(0, "unsupported model format_version");
  }
  Model model;
  const auto wv = doc.at("w").get<std::vector<double>>();
  model.w = Eigen::Map<const Eigen::VectorXd>(wv.data(),
                                              static_cast<Eigen::Index>(wv.size()));
  const auto& div = doc.at("divergence");
  const auto weights = div.at("weights").get<std::vector<double>>();
  Eigen::VectorXd wvec = Eigen::Map<const Eigen::VectorXd>(
      weights.data(), static_cast<Eigen::Index>(weights.size()));
  model.divergence =
      DivergenceSpec::make(kind_from_string(div.at("kind").get<std::string>()),
                           std::move(wvec));
  model.C = doc.at("C").get<double>();
  const auto& fn = doc.at("feature_norm");
  model.feature_norm.mode =
      feature_norm_mode_from_string(fn.at("mode").get<std::string>());
  const auto mins = fn.at("min").get<std::vector<double>>();
  const auto maxs = fn.at("max").get<std::vector<double>>();
  model.feature_norm.min = Eigen::Map<const Eigen::VectorXd>(
      mins.data(), static_cast<Eigen::Index>(mins.size()));
  model.feature_norm.max = Eigen::Map<const Eigen::VectorXd>(
      maxs.data(), static_cast<Eigen::Index>(maxs.size()));
  model.normalized = doc.at("normalized_flag").get<bool>();
  return model;
}

}  // namespace bregrank
