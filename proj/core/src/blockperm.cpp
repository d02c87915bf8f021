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
#include "bregrank/blockperm.hpp"

#include <algorithm>
#include <map>

#include "bregrank/ordercone.hpp"

namespace bregrank {

int BlockPartition::size() const {
  int d = 0;
  for (const auto& b : blocks) d += static_cast<int>(b.size());
  return d;
}

void BlockPartition::validate() const {
  if (blocks.size() != grades.size()) {
    throw ConeViolation("block partition: one grade per block required");
  }
  const int d = size();
  std::vector<char> seen(static_cast<size_t>(d), 0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw ConeViolation("block partition: empty block");
    if (b + 1 < blocks.size() && grades[b] <= grades[b + 1]) {
      throw ConeViolation("block partition: grades must strictly decrease");
    }
    for (int idx : blocks[b]) {
      if (idx < 0 || idx >= d || seen[static_cast<size_t>(idx)]) {
        throw ConeViolation("block partition: indices must partition 0..d-1");
      }
      seen[static_cast<size_t>(idx)] = 1;
    }
  }
}

BlockPartition blocks_from_grades(const Eigen::VectorXi& grades) {
  // Grade -> indices in original order; highest grade first.
  std::map<int, std::vector<int>, std::greater<int>> groups;
  for (Eigen::Index i = 0; i < grades.size(); ++i) {
    groups[grades[i]].push_back(static_cast<int>(i));
  }
  BlockPartition out;
  for (auto& [g, idx] : groups) {
    out.grades.push_back(g);
    out.blocks.push_back(std::move(idx));
  }
  out.validate();
  return out;
}

BlockPermutation initial_permutation(const BlockPartition& partition) {
  partition.validate();
  BlockPermutation perm;
  perm.slot_to_doc.reserve(static_cast<size_t>(partition.size()));
  for (const auto& b : partition.blocks) {
    perm.slot_to_doc.insert(perm.slot_to_doc.end(), b.begin(), b.end());
  }
  return perm;
}

BlockPermutation block_sort(const Eigen::VectorXd& targets,
                            const Eigen::VectorXd& scores,
                            const BlockPartition& partition) {
  partition.validate();
  const int d = partition.size();
  if (targets.size() != d || scores.size() != d) {
    throw DimensionMismatch("block_sort: vector sizes");
  }
  if (!is_descending(targets, 1e-9)) {
    throw ConeViolation("block_sort: targets must be descending");
  }
  BlockPermutation perm;
  perm.slot_to_doc.reserve(static_cast<size_t>(d));
  for (const auto& block : partition.blocks) {
    std::vector<int> order = block;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scores[a] > scores[b];
    });
    perm.slot_to_doc.insert(perm.slot_to_doc.end(), order.begin(), order.end());
  }
  return perm;
}

Eigen::MatrixXd apply_block_perm(const BlockPermutation& perm,
                                 const Eigen::MatrixXd& rows) {
  if (static_cast<Eigen::Index>(perm.slot_to_doc.size()) != rows.rows()) {
    throw DimensionMismatch("apply_block_perm: row count");
  }
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index s = 0; s < rows.rows(); ++s) {
    out.row(s) = rows.row(perm.slot_to_doc[static_cast<size_t>(s)]);
  }
  return out;
}

Eigen::VectorXd apply_block_perm(const BlockPermutation& perm,
                                 const Eigen::VectorXd& values) {
  if (static_cast<Eigen::Index>(perm.slot_to_doc.size()) != values.size()) {
    throw DimensionMismatch("apply_block_perm: vector size");
  }
  Eigen::VectorXd out(values.size());
  for (Eigen::Index s = 0; s < values.size(); ++s) {
    out[s] = values[perm.slot_to_doc[static_cast<size_t>(s)]];
  }
  return out;
}

}  // namespace bregrank
