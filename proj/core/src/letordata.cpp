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
#include "bregrank/letordata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace bregrank {

namespace {

struct RawDoc {
  int grade = 0;
  std::vector<std::pair<int, double>> feats;
  std::string doc_id;
};

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

int parse_int(const std::string& tok, long line, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("malformed ") + what + ": '" + tok + "'");
  }
  return value;
}

double parse_double(const std::string& tok, long line, const char* what) {
  try {
    size_t used = 0;
    const double value = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return value;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("malformed ") + what + ": '" + tok + "'");
  }
}

}  // namespace

Eigen::Index Dataset::total_documents() const {
  Eigen::Index total = 0;
  for (const QuerySet& q : queries) total += q.grades.size();
  return total;
}

Dataset parse_letor(std::istream& in) {
  std::unordered_map<std::string, size_t> qindex;
  std::vector<std::string> qorder;
  std::vector<std::vector<RawDoc>> qdocs;
  int max_feature = 0;
  int gmax = 0;

  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    std::string comment;
    if (const size_t hash = body.find('#'); hash != std::string::npos) {
      comment = trim(body.substr(hash + 1));
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;

    std::istringstream toks(body);
    std::string tok;
    toks >> tok;
    RawDoc doc;
    doc.grade = parse_int(tok, lineno, "grade");
    if (doc.grade < 0) throw ParseError(lineno, "negative grade");
    doc.doc_id = comment;

    if (!(toks >> tok) || tok.rfind("qid:", 0) != 0 || tok.size() == 4) {
      throw ParseError(lineno, "expected qid:<id> after the grade");
    }
    const std::string qid = tok.substr(4);

    while (toks >> tok) {
      const size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError(lineno, "malformed feature token: '" + tok + "'");
      }
      const int idx = parse_int(tok.substr(0, colon), lineno, "feature index");
      if (idx < 1) throw ParseError(lineno, "feature indices start at 1");
      const double value = parse_double(tok.substr(colon + 1), lineno, "feature value");
      doc.feats.emplace_back(idx, value);
      max_feature = std::max(max_feature, idx);
    }

    gmax = std::max(gmax, doc.grade);
    const auto [it, inserted] = qindex.emplace(qid, qorder.size());
    if (inserted) {
      qorder.push_back(qid);
      qdocs.emplace_back();
    }
    qdocs[it->second].push_back(std::move(doc));
  }

  if (qorder.empty()) throw EmptyDataset("no documents parsed");

  Dataset ds;
  ds.feature_dim = max_feature;
  ds.gmax = gmax;
  ds.queries.reserve(qorder.size());
  for (size_t qi = 0; qi < qorder.size(); ++qi) {
    QuerySet qs;
    qs.qid = qorder[qi];
    const auto& docs = qdocs[qi];
    const Eigen::Index d = static_cast<Eigen::Index>(docs.size());
    qs.features = Eigen::MatrixXd::Zero(d, max_feature);
    qs.grades.resize(d);
    qs.doc_ids.resize(docs.size());
    for (Eigen::Index r = 0; r < d; ++r) {
      const RawDoc& doc = docs[static_cast<size_t>(r)];
      qs.grades[r] = doc.grade;
      qs.doc_ids[static_cast<size_t>(r)] = doc.doc_id;
      for (const auto& [idx, value] : doc.feats) {
        qs.features(r, idx - 1) = value;
      }
    }
    ds.queries.push_back(std::move(qs));
  }
  return ds;
}

Dataset parse_letor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open dataset file: " + path);
  return parse_letor(in);
}

void write_letor(const Dataset& ds, std::ostream& out) {
  char buf[64];
  for (const QuerySet& qs : ds.queries) {
    for (Eigen::Index r = 0; r < qs.grades.size(); ++r) {
      out << qs.grades[r] << " qid:" << qs.qid;
      for (Eigen::Index c = 0; c < qs.features.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", qs.features(r, c));
        out << ' ' << (c + 1) << ':' << buf;
      }
      const size_t rr = static_cast<size_t>(r);
      if (rr < qs.doc_ids.size() && !qs.doc_ids[rr].empty()) {
        out << " #" << qs.doc_ids[rr];
      }
      out << '\n';
    }
  }
}

void write_letor_file(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot open for writing: " + path);
  write_letor(ds, out);
}

std::pair<Dataset, std::vector<QueryNormStats>> normalize_query_level(
    const Dataset& ds) {
  Dataset out = ds;
  std::vector<QueryNormStats> stats;
  stats.reserve(ds.queries.size());
  for (QuerySet& qs : out.queries) {
    QueryNormStats st;
    st.min = qs.features.colwise().minCoeff();
    st.max = qs.features.colwise().maxCoeff();
    for (Eigen::Index c = 0; c < qs.features.cols(); ++c) {
      const double span = st.max[c] - st.min[c];
      if (span > 0.0) {
        qs.features.col(c) = (qs.features.col(c).array() - st.min[c]) / span;
      } else {
        qs.features.col(c).setZero();
      }
    }
    stats.push_back(std::move(st));
  }
  return {std::move(out), std::move(stats)};
}

std::pair<Dataset, Eigen::VectorXd> synth_generate(const SynthConfig& cfg) {
  if (cfg.n_queries < 1 || cfg.docs_per_query < 1 || cfg.n_features < 1 ||
      cfg.grade_levels < 1) {
    throw DimensionMismatch("synth_generate: all counts must be >= 1");
  }
  if (cfg.noise_sd < 0.0) {
    throw DomainViolation("synth_generate: noise_sd must be >= 0");
  }

  // w* comes from a seed-only stream so different salts share it.
  std::mt19937_64 wstar_rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd wstar(cfg.n_features);
  for (int k = 0; k < cfg.n_features; ++k) wstar[k] = gauss(wstar_rng);

  std::seed_seq data_seed{
      static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
      static_cast<std::uint32_t>(cfg.salt), static_cast<std::uint32_t>(cfg.salt >> 32),
      std::uint32_t{0x5e7a11}};
  std::mt19937_64 rng(data_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Dataset ds;
  ds.feature_dim = cfg.n_features;
  ds.gmax = cfg.grade_levels - 1;
  ds.queries.reserve(static_cast<size_t>(cfg.n_queries));

  const Eigen::Index d = cfg.docs_per_query;
  for (int qi = 0; qi < cfg.n_queries; ++qi) {
    QuerySet qs;
    qs.qid = std::to_string(qi + 1);
    Eigen::VectorXd latent(d);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100) {
        throw DomainViolation("synth_generate: could not draw distinct scores");
      }
      qs.features.resize(d, cfg.n_features);
      for (Eigen::Index r = 0; r < d; ++r) {
        for (int c = 0; c < cfg.n_features; ++c) qs.features(r, c) = unif(rng);
      }
      latent = qs.features * wstar;
      if (cfg.noise_sd > 0.0) {
        for (Eigen::Index r = 0; r < d; ++r) latent[r] += cfg.noise_sd * gauss(rng);
      }
      std::vector<double> sorted(latent.data(), latent.data() + d);
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
    }

    // Ascending rank k lands in quantile bucket k*levels/d.
    std::vector<Eigen::Index> order(static_cast<size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return latent[a] < latent[b]; });
    qs.grades.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      qs.grades[order[static_cast<size_t>(k)]] =
          static_cast<int>(k * cfg.grade_levels / d);
    }
    qs.doc_ids.assign(static_cast<size_t>(d), std::string());
    ds.queries.push_back(std::move(qs));
  }
  return {std::move(ds), std::move(wstar)};
}

}  // namespace bregrank
