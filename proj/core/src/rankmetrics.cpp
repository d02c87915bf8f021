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
#include "bregrank/rankmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace bregrank {

namespace {

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

double discount(Eigen::Index position) {
  return 1.0 / std::log2(static_cast<double>(position) + 2.0);
}

void check_query(const RankedQuery& q) {
  if (q.grades.size() != q.scores.size()) {
    throw DimensionMismatch("ranked query: grades/scores lengths differ");
  }
}

}  // namespace

std::vector<Eigen::Index> ranking(const RankedQuery& q) {
  check_query(q);
  std::vector<Eigen::Index> order(static_cast<size_t>(q.scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return q.scores[a] > q.scores[b];
  });
  return order;
}

MetricValue ndcg_at(const RankedQuery& q, int N) {
  check_query(q);
  const Eigen::Index d = q.grades.size();
  const Eigen::Index limit =
      N <= 0 ? d : std::min<Eigen::Index>(d, static_cast<Eigen::Index>(N));

  const std::vector<Eigen::Index> order = ranking(q);
  double dcg = 0.0;
  for (Eigen::Index pos = 0; pos < limit; ++pos) {
    dcg += gain(q.grades[order[static_cast<size_t>(pos)]]) * discount(pos);
  }

  std::vector<int> ideal(q.grades.data(), q.grades.data() + d);
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double idcg = 0.0;
  for (Eigen::Index pos = 0; pos < limit; ++pos) {
    idcg += gain(ideal[static_cast<size_t>(pos)]) * discount(pos);
  }

  if (idcg <= 0.0) return {0.0, true};
  return {dcg / idcg, false};
}

double err(const RankedQuery& q) {
  check_query(q);
  const double z = std::exp2(static_cast<double>(q.gmax));
  const std::vector<Eigen::Index> order = ranking(q);
  double out = 0.0;
  double survive = 1.0;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const double stop = gain(q.grades[order[pos]]) / z;
    out += survive * stop / static_cast<double>(pos + 1);
    survive *= 1.0 - stop;
  }
  return out;
}

MetricValue average_precision(const RankedQuery& q, int rel_threshold) {
  check_query(q);
  const std::vector<Eigen::Index> order = ranking(q);
  int relevant_seen = 0;
  double acc = 0.0;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    if (q.grades[order[pos]] >= rel_threshold) {
      ++relevant_seen;
      acc += static_cast<double>(relevant_seen) / static_cast<double>(pos + 1);
    }
  }
  if (relevant_seen == 0) return {0.0, true};
  return {acc / static_cast<double>(relevant_seen), false};
}

double precision_at(const RankedQuery& q, int N, int rel_threshold) {
  check_query(q);
  if (N < 1) throw DimensionMismatch("precision_at: cutoff must be positive");
  const std::vector<Eigen::Index> order = ranking(q);
  const size_t limit = std::min(order.size(), static_cast<size_t>(N));
  int hits = 0;
  for (size_t pos = 0; pos < limit; ++pos) {
    if (q.grades[order[pos]] >= rel_threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(N);
}

MetricReport evaluate_queries(const std::vector<RankedQuery>& queries,
                              const std::vector<int>& cutoffs,
                              int rel_threshold) {
  if (queries.empty()) throw EmptyDataset("evaluate_queries: no queries");
  MetricReport report;
  report.cutoffs = cutoffs;
  report.ndcg.assign(cutoffs.size(), 0.0);
  report.precision.assign(cutoffs.size(), 0.0);
  report.queries = static_cast<int>(queries.size());

  int ndcg_kept = 0;
  int map_kept = 0;
  double err_sum = 0.0;
  double map_sum = 0.0;
  double ndcg_full_sum = 0.0;
  std::vector<double> ndcg_sum(cutoffs.size(), 0.0);
  std::vector<double> prec_sum(cutoffs.size(), 0.0);

  for (const RankedQuery& q : queries) {
    err_sum += err(q);
    for (size_t c = 0; c < cutoffs.size(); ++c) {
      prec_sum[c] += precision_at(q, cutoffs[c], rel_threshold);
    }
    const MetricValue ap = average_precision(q, rel_threshold);
    if (!ap.flagged) {
      ++map_kept;
      map_sum += ap.value;
    }
    const MetricValue full = ndcg_at(q, 0);
    if (full.flagged) {
      ++report.flagged;
      continue;
    }
    ++ndcg_kept;
    ndcg_full_sum += full.value;
    for (size_t c = 0; c < cutoffs.size(); ++c) {
      ndcg_sum[c] += ndcg_at(q, cutoffs[c]).value;
    }
  }

  const double all = static_cast<double>(queries.size());
  report.err = err_sum / all;
  for (size_t c = 0; c < cutoffs.size(); ++c) {
    report.precision[c] = prec_sum[c] / all;
  }
  if (map_kept > 0) report.map = map_sum / static_cast<double>(map_kept);
  if (ndcg_kept > 0) {
    const double denom = static_cast<double>(ndcg_kept);
    report.ndcg_full = ndcg_full_sum / denom;
    for (size_t c = 0; c < cutoffs.size(); ++c) {
      report.ndcg[c] = ndcg_sum[c] / denom;
    }
  }
  return report;
}

void write_metrics_csv(const MetricReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot open for writing: " + path);
  out.precision(17);
  out << "metric,cutoff,value\n";
  for (size_t c = 0; c < report.cutoffs.size(); ++c) {
    out << "ndcg," << report.cutoffs[c] << "," << report.ndcg[c] << "\n";
  }
  for (size_t c = 0; c < report.cutoffs.size(); ++c) {
    out << "precision," << report.cutoffs[c] << "," << report.precision[c] << "\n";
  }
  out << "err,," << report.err << "\n";
  out << "map,," << report.map << "\n";
}

}  // namespace bregrank
