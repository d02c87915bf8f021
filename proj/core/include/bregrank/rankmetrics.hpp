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
#ifndef BREGRANK_RANKMETRICS_HPP_
#define BREGRANK_RANKMETRICS_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bregrank/errors.hpp"

namespace bregrank {

// One query's graded relevance plus predicted scores, both in original
// document order. gmax is the dataset-wide grade ceiling (ERR normalizes
// by it, so it must be shared across queries).
struct RankedQuery {
  Eigen::VectorXi grades;
  Eigen::VectorXd scores;
  int gmax = 0;
};

/// Document indices in evaluation order: score descending, equal scores kept
/// in original order. Every metric below ranks through this.
std::vector<Eigen::Index> ranking(const RankedQuery& q);

// Scalar metric plus a degenerate-query marker (no relevant documents);
// flagged queries score 0 and are dropped from dataset averages.
struct MetricValue {
  double value = 0.0;
  bool flagged = false;
};

/// NDCG@N with gain 2^g - 1 and discount 1/log2(position+1), normalized by
/// the ideal ordering. Flagged when the ideal DCG is zero. N <= 0 means the
/// full list.
MetricValue ndcg_at(const RankedQuery& q, int N);

/// Expected reciprocal rank over the full list: stop probability
/// R(g) = (2^g - 1) / 2^gmax cascaded down the ranking.
double err(const RankedQuery& q);

/// Average precision with relevance = grade >= rel_threshold. Flagged when
/// the query has no relevant documents.
MetricValue average_precision(const RankedQuery& q, int rel_threshold = 1);

/// Fraction of the top N that is relevant; the denominator stays N even when
/// the list is shorter.
double precision_at(const RankedQuery& q, int N, int rel_threshold = 1);

// Dataset-level averages. ndcg/precision run parallel to the cutoff list;
// flagged queries are excluded from the NDCG and MAP means (if every query
// is flagged the mean is 0).
struct MetricReport {
  std::vector<int> cutoffs;
  std::vector<double> ndcg;
  std::vector<double> precision;
  double ndcg_full = 0.0;
  double err = 0.0;
  double map = 0.0;
  int queries = 0;
  int flagged = 0;
};

MetricReport evaluate_queries(const std::vector<RankedQuery>& queries,
                              const std::vector<int>& cutoffs,
                              int rel_threshold = 1);

/// CSV rows `metric,cutoff,value`: ndcg and precision per cutoff, then err
/// and map with an empty cutoff field.
void write_metrics_csv(const MetricReport& report, const std::string& path);

}  // namespace bregrank

#endif  // BREGRANK_RANKMETRICS_HPP_
