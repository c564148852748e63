#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecn/core.hpp"

namespace ecn {

/// Expanded neighbor multisets N(i, M), one row of M = t + t*q entries per
/// item: the t first-level neighbors, then the q neighbors of each of them.
struct ExpandedNeighborTable {
  std::size_t n_items = 0;
  std::size_t m = 0;
  std::vector<index_t> neighbors;

  std::span<const index_t> row(std::size_t i) const { return {neighbors.data() + i * m, m}; }
};

/// Complete rank lists: every row sorted by ascending distance, self first,
/// ties broken by ascending index. `pos` is the exact inverse of `order`.
RankListMatrix build_rank_lists(const DistanceMatrix& d);

/// Rank lists truncated to their first `depth` entries (no `pos`). Uses a
/// partial selection per row, O(n) instead of O(n log n).
RankListMatrix build_rank_lists(const DistanceMatrix& d, std::size_t depth);

/// Truncated rank lists straight from features under squared euclidean
/// distance, one distance row at a time. Same lists as
/// build_rank_lists(pairwise_sq_euclidean(features), depth) without the
/// n x n matrix.
RankListMatrix build_rank_lists(const FeatureMatrix& features, std::size_t depth);

/// Builds N(i, M) for every item. Neighbor picks skip rank position 1 (the
/// item itself); second-level expansion may reintroduce the item and
/// duplicates are kept.
ExpandedNeighborTable expand_neighbors(const RankListMatrix& lists, std::size_t t, std::size_t q);

}  // namespace ecn
