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
#ifndef BREGRANK_LETORDATA_HPP_
#define BREGRANK_LETORDATA_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bregrank/errors.hpp"

namespace bregrank {

struct QuerySet {
  std::string qid;
  Eigen::MatrixXd features;  // documents x feature_dim
  Eigen::VectorXi grades;
  std::vector<std::string> doc_ids;  // empty string when the line had no comment
};

struct Dataset {
  std::vector<QuerySet> queries;
  Eigen::Index feature_dim = 0;
  int gmax = 0;

  Eigen::Index total_documents() const;
};

/// Parse `<grade> qid:<id> <k>:<v> ... [#comment]` lines. Documents sharing a
/// qid form one QuerySet (ordered by first appearance, rows in file order);
/// unmentioned feature indices are 0; feature_dim is the largest index seen.
/// Malformed tokens raise ParseError carrying the 1-based line number.
Dataset parse_letor(std::istream& in);
Dataset parse_letor_file(const std::string& path);

/// Dense serialization of the same format, full round-trip precision.
void write_letor(const Dataset& ds, std::ostream& out);
void write_letor_file(const Dataset& ds, const std::string& path);

// Per-query feature bounds observed by normalize_query_level.
struct QueryNormStats {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

/// Per-query per-feature min-max rescale to [0,1]; features constant within
/// a query map to 0. Applying it twice is a no-op.
std::pair<Dataset, std::vector<QueryNormStats>> normalize_query_level(
    const Dataset& ds);

struct SynthConfig {
  int n_queries = 1;
  int docs_per_query = 1;
  int n_features = 1;
  int grade_levels = 2;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  // Extra stream label: datasets with equal seed but different salts share
  // the scoring vector while drawing fresh features and noise, which is how
  // train/test splits of one synthetic world are produced.
  std::uint64_t salt = 0;
};

/// Features i.i.d. uniform on [0,1]; latent scores A w* + Gaussian noise with
/// w* drawn from the seed alone; grades bucket the latent scores into
/// grade_levels per-query quantile bins (top scores get the top grade).
/// Queries whose latent scores collide are redrawn so the buckets are
/// well defined. Returns the dataset and w*.
std::pair<Dataset, Eigen::VectorXd> synth_generate(const SynthConfig& cfg);

}  // namespace bregrank

#endif  // BREGRANK_LETORDATA_HPP_
