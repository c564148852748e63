#include "ecn/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ecn/distance.hpp"
#include "parallel.hpp"

namespace ecn {
namespace {

void check_square(const DistanceMatrix& d) {
  if (d.rows == 0) throw Error(ErrorCode::EmptyMatrix, "distance matrix is empty");
  if (!d.is_square() || d.data.size() != d.rows * d.cols) {
    throw Error(ErrorCode::ShapeMismatch, "rank lists need a square distance matrix");
  }
}

// Strict weak order for row i: self first, then distance, then index.
struct RowOrder {
  std::span<const double> dist;
  index_t self;

  bool operator()(index_t a, index_t b) const {
    if (a == self || b == self) return a == self && b != self;
    const double da = dist[static_cast<std::size_t>(a)];
    const double db = dist[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return a < b;
  }
};

RankListMatrix empty_lists(std::size_t n, std::size_t depth) {
  if (depth == 0 || depth > n) {
    throw Error(ErrorCode::InvalidParams,
                "rank list depth " + std::to_string(depth) + " outside [1, " + std::to_string(n) + "]");
  }
  RankListMatrix lists;
  lists.n_items = n;
  lists.depth = depth;
  lists.order.resize(n * depth);
  return lists;
}

// Writes the first `depth` entries of list i, ordered by `dist`, into `out`.
void select_row(std::span<const double> dist, std::size_t i, std::size_t depth, index_t* out) {
  thread_local std::vector<index_t> idx;
  idx.resize(dist.size());
  std::iota(idx.begin(), idx.end(), index_t{0});
  const RowOrder cmp{dist, static_cast<index_t>(i)};
  const auto mid = idx.begin() + static_cast<std::ptrdiff_t>(depth);
  if (depth < dist.size()) std::nth_element(idx.begin(), mid, idx.end(), cmp);
  std::sort(idx.begin(), mid, cmp);
  std::copy(idx.begin(), mid, out);
}

}  // namespace

RankListMatrix build_rank_lists(const DistanceMatrix& d) {
  RankListMatrix lists = build_rank_lists(d, d.rows);
  lists.pos = positions_from_order(lists.order, lists.n_items);
  return lists;
}

RankListMatrix build_rank_lists(const DistanceMatrix& d, std::size_t depth) {
  check_square(d);
  RankListMatrix lists = empty_lists(d.rows, depth);
  detail::parallel_for(d.rows, [&](std::size_t i) {
    select_row(d.row(i), i, depth, lists.order.data() + i * depth);
  });
  return lists;
}

RankListMatrix build_rank_lists(const FeatureMatrix& features, std::size_t depth) {
  validate_feature_matrix(features);
  const std::size_t n = features.n_items;
  RankListMatrix lists = empty_lists(n, depth);
  const SqEuclideanKernel kernel(features);
  detail::parallel_for(n, [&](std::size_t i) {
    thread_local std::vector<double> row;
    row.resize(n);
    kernel.row(i, row);
    select_row(row, i, depth, lists.order.data() + i * depth);
  });
  return lists;
}

ExpandedNeighborTable expand_neighbors(const RankListMatrix& lists, std::size_t t, std::size_t q) {
  const std::size_t n = lists.n_items;
  EcnParams p;
  p.t = t;
  p.q = q;
  validate_params(p, n);
  if (lists.depth < std::max(t, q) + 1) {
    throw Error(ErrorCode::InvalidParams, "rank lists of depth " + std::to_string(lists.depth) +
                                              " are too short for t=" + std::to_string(t) +
                                              ", q=" + std::to_string(q));
  }

  ExpandedNeighborTable table;
  table.n_items = n;
  table.m = p.m();
  table.neighbors.resize(n * table.m);
  detail::parallel_for(n, [&](std::size_t i) {
    auto out = table.neighbors.begin() + static_cast<std::ptrdiff_t>(i * table.m);
    for (std::size_t a = 1; a <= t; ++a) *out++ = lists.at(i, a);
    for (std::size_t a = 1; a <= t; ++a) {
      const auto first = static_cast<std::size_t>(lists.at(i, a));
      for (std::size_t b = 1; b <= q; ++b) *out++ = lists.at(first, b);
    }
  });
  return table;
}

}  // namespace ecn
