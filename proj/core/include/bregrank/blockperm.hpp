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
#ifndef BREGRANK_BLOCKPERM_HPP_
#define BREGRANK_BLOCKPERM_HPP_

#include <Eigen/Core>
#include <vector>

#include "bregrank/errors.hpp"

namespace bregrank {

/// Documents of one query grouped by relevance grade, blocks ordered by
/// strictly decreasing grade. Indices refer to the original row order.
/// Concatenating the blocks yields the canonical slot order: slot s holds
/// the s-th position of the descending target vector.
struct BlockPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> grades;  // one grade per block, strictly decreasing

  int size() const;
  /// Blocks must be nonempty, disjoint, cover 0..d-1, with strictly
  /// decreasing grades. Throws ConeViolation otherwise.
  void validate() const;
};

/// Assignment of documents to slots that fixes every block setwise:
/// slot_to_doc[s] is a document index from the block that owns slot s.
struct BlockPermutation {
  std::vector<int> slot_to_doc;
};

/// Groups indices by grade, highest grade first; ties keep original order.
BlockPartition blocks_from_grades(const Eigen::VectorXi& grades);

/// Concatenation of the blocks in order: the canonical slot assignment.
BlockPermutation initial_permutation(const BlockPartition& partition);

/// Within each block, assigns the largest target slot to the document with
/// the largest score (descending by score, stable on ties). Targets must be
/// descending; the global target order is unchanged. For any separable
/// Bregman divergence this pairing minimizes the divergence between the
/// descending targets and the permuted predictions over all block-respecting
/// assignments, because both sequences end up sorted the same way.
BlockPermutation block_sort(const Eigen::VectorXd& targets,
                            const Eigen::VectorXd& scores,
                            const BlockPartition& partition);

/// Row reorder: out.row(s) = in.row(perm.slot_to_doc[s]).
Eigen::MatrixXd apply_block_perm(const BlockPermutation& perm,
                                 const Eigen::MatrixXd& rows);
Eigen::VectorXd apply_block_perm(const BlockPermutation& perm,
                                 const Eigen::VectorXd& values);

}  // namespace bregrank

#endif  // BREGRANK_BLOCKPERM_HPP_
