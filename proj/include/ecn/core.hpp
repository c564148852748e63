#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecn/error.hpp"

namespace ecn {

/// Item index into the union of query and gallery items.
using index_t = std::int32_t;

/// N x D embedding matrix, row-major, one feature vector per item.
struct FeatureMatrix {
  std::size_t n_items = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
};

/// Dense row-major distance matrix. Square (n x n) over the union of items,
/// or rectangular (queries x gallery) for re-ranked outputs.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DistanceMatrix() = default;
  DistanceMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  bool is_square() const { return rows == cols; }
  std::size_t n_items() const { return rows; }

  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Per-item ordered neighbor lists.
///
/// `order` holds the first `depth` entries of every rank list (row-major,
/// n_items x depth); order[i][0] == i. When the lists are complete
/// (depth == n_items) `pos` holds the 1-based inverse map, pos[i][b] being the
/// position of item b in list i. Truncated lists carry no `pos`.
struct RankListMatrix {
  std::size_t n_items = 0;
  std::size_t depth = 0;
  std::vector<index_t> order;
  std::vector<index_t> pos;

  bool is_complete() const { return depth == n_items; }

  std::span<const index_t> row(std::size_t i) const {
    return {order.data() + i * depth, depth};
  }
  index_t at(std::size_t i, std::size_t r) const { return order[i * depth + r]; }
  /// 1-based position of `b` in list `i`; complete lists only.
  index_t position(std::size_t i, std::size_t b) const { return pos[i * n_items + b]; }
};

enum class Role { Query, Gallery };

struct EvalRecord {
  index_t item_index = 0;
  std::int64_t person_id = 0;
  std::int64_t camera_id = 0;
  Role role = Role::Gallery;
};

using EvalRecords = std::vector<EvalRecord>;

enum class Method {
  None,          ///< original distances, no re-ranking
  RankDistOnly,  ///< 1 - minmax(rank-list similarity)
  EcnOrigDist,   ///< ECN aggregation over the original distances
  EcnRankDist,   ///< ECN aggregation over the rank-list distances
};

struct EcnParams {
  std::size_t t = 3;
  std::size_t q = 8;
  std::size_t k = 25;
  Method method = Method::EcnRankDist;

  /// Size of the expanded neighbor multiset.
  std::size_t m() const { return t + t * q; }
};

/// Throws unless every FeatureMatrix invariant holds.
void validate_feature_matrix(const FeatureMatrix& m);

/// Checks shape, finiteness and non-negativity. With `require_square` also
/// checks the zero diagonal and exact symmetry.
void validate_distance_matrix(const DistanceMatrix& d, bool require_square);

/// Throws InvalidParams / ParamsTooLarge when `p` cannot run on `n_items`.
void validate_params(const EcnParams& p, std::size_t n_items);

/// Rebuilds `pos` from `order` (complete lists only).
std::vector<index_t> positions_from_order(std::span<const index_t> order, std::size_t n_items);
/// Rebuilds `order` from `pos`.
std::vector<index_t> order_from_positions(std::span<const index_t> pos, std::size_t n_items);

/// Item indexes with the given role, ascending.
std::vector<index_t> indices_with_role(const EvalRecords& records, Role role);

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Worker count used by row-parallel kernels. 0 restores the runtime default.
void set_num_threads(int n);
int num_threads();

}  // namespace ecn
