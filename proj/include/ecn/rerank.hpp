#pragma once

#include <span>

#include "ecn/core.hpp"
#include "ecn/ranking.hpp"

namespace ecn {

/// Rank-list similarity R(L_i, L_j) between every pair of lists.
struct SimilarityMatrix {
  std::size_t n_items = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t j) const { return data[i * n_items + j]; }
};

/// R[i][j] = sum_b [K+1-pos_i(b)]_+ * [K+1-pos_j(b)]_+.
///
/// Each weight row has at most K non-zeros, so the product W * W^T is
/// accumulated through per-item inverted lists in O(n K^2 + n^2). Weights are
/// integers, which makes the result exact and exactly symmetric. Lists only
/// need to be min(K, n) deep.
SimilarityMatrix rank_list_similarity(const RankListMatrix& lists, std::size_t k);

/// Same quantity via the dense weight matrix: W materialized as n x n floats,
/// W * W^T accumulated in doubles. O(n^3); reference path for small inputs.
SimilarityMatrix rank_list_similarity_dense(const RankListMatrix& lists, std::size_t k);

/// Rank-list similarity stored by row (CSR). Entries absent from a row are
/// zero; `min_value` and `max_value` range over all n x n entries.
struct SparseSimilarity {
  std::size_t n_items = 0;
  std::vector<std::size_t> offsets;  ///< n_items + 1 row starts
  std::vector<index_t> columns;      ///< ascending within a row
  std::vector<double> values;
  double min_value = 0.0;
  double max_value = 0.0;

  /// Writes row i densely into `out` (length n_items).
  void expand_row(std::size_t i, std::span<double> out) const;
};

/// Same values as rank_list_similarity, keeping only the non-zeros.
SparseSimilarity rank_list_similarity_sparse(const RankListMatrix& lists, std::size_t k);

/// d = 1 - minmax(R), with min and max taken over every entry including the
/// diagonal. Throws DegenerateSimilarity on a constant matrix.
DistanceMatrix rank_dist(const SimilarityMatrix& sim);
DistanceMatrix rank_dist(SimilarityMatrix&& sim);

/// Expanded cross neighborhood distance for every (query, gallery) pair:
///
///   out[p][g] = 1/(2M) * sum_j base[pN_j][g] + base[gN_j][p]
///
/// `queries` and `gallery` index rows/columns of `base`; the output is
/// queries.size() x gallery.size().
DistanceMatrix ecn_distance(const DistanceMatrix& base, const ExpandedNeighborTable& neighbors,
                            std::span<const index_t> queries, std::span<const index_t> gallery);

/// rank_dist(R) restricted to queries x gallery, from sparse R.
DistanceMatrix rank_dist(const SparseSimilarity& sim, std::span<const index_t> queries,
                         std::span<const index_t> gallery);

/// ecn_distance(rank_dist(R), ...) without materializing the n x n rank
/// distance. Uses that 1 - minmax(R) is affine in R, so the neighborhood
/// sums run over the sparse similarities:
///
///   out[p][g] = 1 - (S / 2M - min R) / (max R - min R),
///   S = sum_j R[pN_j][g] + R[gN_j][p]
DistanceMatrix ecn_rank_distance(const SparseSimilarity& sim, const ExpandedNeighborTable& neighbors,
                                 std::span<const index_t> queries, std::span<const index_t> gallery);

/// Full pipeline from features: squared euclidean distances over the union,
/// then the re-ranking selected by `params.method`. Output is query x gallery
/// with queries and gallery in ascending item order.
DistanceMatrix rerank(const FeatureMatrix& features, const EcnParams& params,
                      const EvalRecords& records);

/// Full pipeline from a precomputed union distance matrix.
DistanceMatrix rerank(const DistanceMatrix& distances, const EcnParams& params,
                      const EvalRecords& records);

/// Rows `queries`, columns `gallery` of a square matrix.
DistanceMatrix slice(const DistanceMatrix& d, std::span<const index_t> queries,
                     std::span<const index_t> gallery);

}  // namespace ecn
