#include "ecn/rerank.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ecn/distance.hpp"
#include "parallel.hpp"

namespace ecn {
namespace {

struct Posting {
  index_t item;
  double weight;
};

std::size_t effective_depth(const RankListMatrix& lists, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  const std::size_t kk = std::min(k, lists.n_items);
  if (lists.depth < kk) {
    throw Error(ErrorCode::InvalidParams, "rank lists of depth " + std::to_string(lists.depth) +
                                              " are shorter than k=" + std::to_string(kk));
  }
  return kk;
}

void check_index(index_t idx, std::size_t n, const char* what) {
  if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
    throw Error(ErrorCode::IndexOutOfRange, std::string(what) + " index " + std::to_string(idx) +
                                                " outside [0, " + std::to_string(n) + ")");
  }
}

std::vector<std::vector<Posting>> build_postings(const RankListMatrix& lists, std::size_t k,
                                                std::size_t kk) {
  // postings[b] lists every (i, K+1-pos_i(b)) with pos_i(b) <= K, i ascending
  std::vector<std::vector<Posting>> postings(lists.n_items);
  for (std::size_t i = 0; i < lists.n_items; ++i) {
    for (std::size_t r = 0; r < kk; ++r) {
      postings[static_cast<std::size_t>(lists.at(i, r))].push_back(
          {static_cast<index_t>(i), static_cast<double>(k - r)});
    }
  }
  return postings;
}

double similarity_span(const SparseSimilarity& sim) {
  if (!(sim.max_value > sim.min_value)) {
    throw Error(ErrorCode::DegenerateSimilarity,
                "all similarity values equal " + std::to_string(sim.min_value));
  }
  return sim.max_value - sim.min_value;
}

void check_records(const EvalRecords& records, std::size_t n) {
  for (const auto& r : records) check_index(r.item_index, n, "record");
}

}  // namespace

SimilarityMatrix rank_list_similarity(const RankListMatrix& lists, std::size_t k) {
  const std::size_t n = lists.n_items;
  const std::size_t kk = effective_depth(lists, k);

  const auto postings = build_postings(lists, k, kk);

  SimilarityMatrix sim{n, std::vector<double>(n * n, 0.0)};
  detail::parallel_for(n, [&](std::size_t i) {
    double* row = sim.data.data() + i * n;
    for (std::size_t r = 0; r < kk; ++r) {
      const double w = static_cast<double>(k - r);
      for (const auto& p : postings[static_cast<std::size_t>(lists.at(i, r))]) {
        row[p.item] += w * p.weight;
      }
    }
  });
  return sim;
}

void SparseSimilarity::expand_row(std::size_t i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
    out[static_cast<std::size_t>(columns[e])] = values[e];
  }
}

SparseSimilarity rank_list_similarity_sparse(const RankListMatrix& lists, std::size_t k) {
  const std::size_t n = lists.n_items;
  const std::size_t kk = effective_depth(lists, k);
  const auto postings = build_postings(lists, k, kk);

  std::vector<std::vector<index_t>> row_cols(n);
  std::vector<std::vector<double>> row_vals(n);
  detail::parallel_for(n, [&](std::size_t i) {
    thread_local std::vector<double> acc;
    acc.assign(n, 0.0);
    for (std::size_t r = 0; r < kk; ++r) {
      const double w = static_cast<double>(k - r);
      for (const auto& p : postings[static_cast<std::size_t>(lists.at(i, r))]) {
        acc[static_cast<std::size_t>(p.item)] += w * p.weight;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (acc[j] == 0.0) continue;
      row_cols[i].push_back(static_cast<index_t>(j));
      row_vals[i].push_back(acc[j]);
    }
  });

  SparseSimilarity sim;
  sim.n_items = n;
  sim.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) sim.offsets[i + 1] = sim.offsets[i] + row_cols[i].size();
  sim.columns.reserve(sim.offsets[n]);
  sim.values.reserve(sim.offsets[n]);
  bool has_zero = false;
  for (std::size_t i = 0; i < n; ++i) {
    has_zero = has_zero || row_cols[i].size() < n;
    sim.columns.insert(sim.columns.end(), row_cols[i].begin(), row_cols[i].end());
    sim.values.insert(sim.values.end(), row_vals[i].begin(), row_vals[i].end());
  }
  // every stored weight product is positive, so absent entries are the only zeros
  const auto [lo, hi] = std::minmax_element(sim.values.begin(), sim.values.end());
  sim.max_value = *hi;
  sim.min_value = has_zero ? 0.0 : *lo;
  return sim;
}

DistanceMatrix rank_dist(const SparseSimilarity& sim, std::span<const index_t> queries,
                         std::span<const index_t> gallery) {
  const double span = similarity_span(sim);
  for (const index_t q : queries) check_index(q, sim.n_items, "query");
  for (const index_t g : gallery) check_index(g, sim.n_items, "gallery");
  DistanceMatrix out(queries.size(), gallery.size());
  detail::parallel_for(queries.size(), [&](std::size_t a) {
    thread_local std::vector<double> row;
    row.resize(sim.n_items);
    sim.expand_row(static_cast<std::size_t>(queries[a]), row);
    for (std::size_t b = 0; b < gallery.size(); ++b) {
      out(a, b) = 1.0 - (row[static_cast<std::size_t>(gallery[b])] - sim.min_value) / span;
    }
  });
  return out;
}

DistanceMatrix ecn_rank_distance(const SparseSimilarity& sim, const ExpandedNeighborTable& neighbors,
                                 std::span<const index_t> queries, std::span<const index_t> gallery) {
  const double span = similarity_span(sim);
  const std::size_t n = sim.n_items;
  if (neighbors.n_items != n) {
    throw Error(ErrorCode::ShapeMismatch, "similarity and neighbor table cover different items");
  }
  for (const index_t q : queries) check_index(q, n, "query");
  for (const index_t g : gallery) check_index(g, n, "gallery");
  for (const index_t j : neighbors.neighbors) check_index(j, n, "neighbor");

  // item -> gallery column, -1 when the item is not in the gallery
  std::vector<std::ptrdiff_t> gallery_col(n, -1);
  for (std::size_t b = 0; b < gallery.size(); ++b) {
    gallery_col[static_cast<std::size_t>(gallery[b])] = static_cast<std::ptrdiff_t>(b);
  }

  const double two_m = 2.0 * static_cast<double>(neighbors.m);
  DistanceMatrix out(queries.size(), gallery.size());
  detail::parallel_for(queries.size(), [&](std::size_t a) {
    const auto p = static_cast<std::size_t>(queries[a]);
    auto acc = out.row(a);
    // sum_j R[pN_j][g]
    for (const index_t j : neighbors.row(p)) {
      const auto row = static_cast<std::size_t>(j);
      for (std::size_t e = sim.offsets[row]; e < sim.offsets[row + 1]; ++e) {
        const auto b = gallery_col[static_cast<std::size_t>(sim.columns[e])];
        if (b >= 0) acc[static_cast<std::size_t>(b)] += sim.values[e];
      }
    }
    // sum_j R[gN_j][p] == sum_j R[p][gN_j] by symmetry
    thread_local std::vector<double> own;
    own.resize(n);
    sim.expand_row(p, own);
    for (std::size_t b = 0; b < gallery.size(); ++b) {
      double s = acc[b];
      for (const index_t j : neighbors.row(static_cast<std::size_t>(gallery[b]))) {
        s += own[static_cast<std::size_t>(j)];
      }
      acc[b] = 1.0 - (s / two_m - sim.min_value) / span;
    }
  });
  return out;
}

SimilarityMatrix rank_list_similarity_dense(const RankListMatrix& lists, std::size_t k) {
  const std::size_t n = lists.n_items;
  const std::size_t kk = effective_depth(lists, k);

  std::vector<float> w(n * n, 0.0f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < kk; ++r) {
      w[i * n + static_cast<std::size_t>(lists.at(i, r))] = static_cast<float>(k - r);
    }
  }

  SimilarityMatrix sim{n, std::vector<double>(n * n, 0.0)};
  detail::parallel_for(n, [&](std::size_t i) {
    const float* wi = w.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const float* wj = w.data() + j * n;
      double acc = 0.0;
      for (std::size_t b = 0; b < n; ++b) acc += static_cast<double>(wi[b]) * static_cast<double>(wj[b]);
      sim.data[i * n + j] = acc;
    }
  });
  return sim;
}

DistanceMatrix rank_dist(const SimilarityMatrix& sim) { return rank_dist(SimilarityMatrix(sim)); }

DistanceMatrix rank_dist(SimilarityMatrix&& sim) {
  if (sim.n_items == 0 || sim.data.size() != sim.n_items * sim.n_items) {
    throw Error(ErrorCode::ShapeMismatch, "similarity matrix must be square and non-empty");
  }
  const auto [lo_it, hi_it] = std::minmax_element(sim.data.begin(), sim.data.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(ErrorCode::DegenerateSimilarity, "all similarity values equal " + std::to_string(lo));
  }
  const double span = hi - lo;

  DistanceMatrix d;
  d.rows = d.cols = sim.n_items;
  d.data = std::move(sim.data);
  detail::parallel_for(d.rows, [&](std::size_t i) {
    for (double& v : d.row(i)) v = 1.0 - (v - lo) / span;
  });
  return d;
}

DistanceMatrix ecn_distance(const DistanceMatrix& base, const ExpandedNeighborTable& neighbors,
                            std::span<const index_t> queries, std::span<const index_t> gallery) {
  if (!base.is_square() || base.rows != neighbors.n_items) {
    throw Error(ErrorCode::ShapeMismatch, "base distances and neighbor table cover different items");
  }
  const std::size_t n = base.rows;
  for (const index_t q : queries) check_index(q, n, "query");
  for (const index_t g : gallery) check_index(g, n, "gallery");
  for (const index_t j : neighbors.neighbors) check_index(j, n, "neighbor");

  // columns of `base` at the queries, transposed so each query reads one
  // contiguous row when summing over gallery neighborhoods
  constexpr std::size_t kTile = 64;
  DistanceMatrix query_cols(queries.size(), n);
  detail::parallel_for((n + kTile - 1) / kTile, [&](std::size_t tile) {
    const std::size_t x0 = tile * kTile;
    const std::size_t x1 = std::min(n, x0 + kTile);
    for (std::size_t a0 = 0; a0 < queries.size(); a0 += kTile) {
      const std::size_t a1 = std::min(queries.size(), a0 + kTile);
      for (std::size_t x = x0; x < x1; ++x) {
        const auto src = base.row(x);
        for (std::size_t a = a0; a < a1; ++a) query_cols(a, x) = src[static_cast<std::size_t>(queries[a])];
      }
    }
  });

  const double scale = 1.0 / (2.0 * static_cast<double>(neighbors.m));
  DistanceMatrix out(queries.size(), gallery.size());
  detail::parallel_for(queries.size(), [&](std::size_t a) {
    auto acc = out.row(a);
    // sum_j base[pN_j][g]
    for (const index_t j : neighbors.row(static_cast<std::size_t>(queries[a]))) {
      const auto src = base.row(static_cast<std::size_t>(j));
      for (std::size_t b = 0; b < gallery.size(); ++b) acc[b] += src[static_cast<std::size_t>(gallery[b])];
    }
    // sum_j base[gN_j][p]
    const auto col = query_cols.row(a);
    for (std::size_t b = 0; b < gallery.size(); ++b) {
      double from_gallery = 0.0;
      for (const index_t j : neighbors.row(static_cast<std::size_t>(gallery[b]))) {
        from_gallery += col[static_cast<std::size_t>(j)];
      }
      acc[b] = (acc[b] + from_gallery) * scale;
    }
  });
  return out;
}

DistanceMatrix slice(const DistanceMatrix& d, std::span<const index_t> queries,
                     std::span<const index_t> gallery) {
  for (const index_t q : queries) check_index(q, d.rows, "query");
  for (const index_t g : gallery) check_index(g, d.cols, "gallery");
  DistanceMatrix out(queries.size(), gallery.size());
  for (std::size_t a = 0; a < queries.size(); ++a) {
    const auto src = d.row(static_cast<std::size_t>(queries[a]));
    for (std::size_t b = 0; b < gallery.size(); ++b) out(a, b) = src[static_cast<std::size_t>(gallery[b])];
  }
  return out;
}

namespace {

struct Split {
  std::vector<index_t> queries;
  std::vector<index_t> gallery;
};

Split split_records(const EvalRecords& records, std::size_t n) {
  check_records(records, n);
  Split s{indices_with_role(records, Role::Query), indices_with_role(records, Role::Gallery)};
  if (s.queries.empty() || s.gallery.empty()) {
    throw Error(ErrorCode::InvalidParams, "records need at least one query and one gallery item");
  }
  return s;
}

std::size_t list_depth(const EcnParams& params, std::size_t n) {
  std::size_t depth = std::max(params.t, params.q) + 1;
  if (params.method != Method::EcnOrigDist) depth = std::max(depth, std::min(params.k, n));
  return std::min(depth, n);
}

// Methods that only need the truncated rank lists.
DistanceMatrix rerank_from_lists(const RankListMatrix& lists, const EcnParams& params,
                                 const Split& split) {
  const SparseSimilarity sim = rank_list_similarity_sparse(lists, params.k);
  if (params.method == Method::RankDistOnly) return rank_dist(sim, split.queries, split.gallery);
  return ecn_rank_distance(sim, expand_neighbors(lists, params.t, params.q), split.queries,
                           split.gallery);
}

// `distances` must already satisfy the square DistanceMatrix invariants.
DistanceMatrix rerank_union(const DistanceMatrix& distances, const EcnParams& params,
                            const EvalRecords& records) {
  const std::size_t n = distances.rows;
  const Split split = split_records(records, n);
  if (params.method == Method::None) return slice(distances, split.queries, split.gallery);

  validate_params(params, n);
  const RankListMatrix lists = build_rank_lists(distances, list_depth(params, n));
  if (params.method == Method::EcnOrigDist) {
    return ecn_distance(distances, expand_neighbors(lists, params.t, params.q), split.queries,
                        split.gallery);
  }
  return rerank_from_lists(lists, params, split);
}

}  // namespace

DistanceMatrix rerank(const FeatureMatrix& features, const EcnParams& params,
                      const EvalRecords& records) {
  if (params.method == Method::None || params.method == Method::EcnOrigDist) {
    return rerank_union(pairwise_sq_euclidean(features), params, records);
  }
  validate_feature_matrix(features);
  const std::size_t n = features.n_items;
  const Split split = split_records(records, n);
  validate_params(params, n);
  return rerank_from_lists(build_rank_lists(features, list_depth(params, n)), params, split);
}

DistanceMatrix rerank(const DistanceMatrix& distances, const EcnParams& params,
                      const EvalRecords& records) {
  validate_distance_matrix(distances, true);
  return rerank_union(distances, params, records);
}

}  // namespace ecn
