#include "ecn/core.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace ecn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::InvalidDistance: return "InvalidDistance";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParamsTooLarge: return "ParamsTooLarge";
    case ErrorCode::DegenerateSimilarity: return "DegenerateSimilarity";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoValidQueries: return "NoValidQueries";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::UnknownRole: return "UnknownRole";
    case ErrorCode::IndexGap: return "IndexGap";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
  }
  return "Unknown";
}

void validate_feature_matrix(const FeatureMatrix& m) {
  if (m.n_items == 0 || m.dim == 0) {
    throw Error(ErrorCode::EmptyMatrix, "feature matrix has " + std::to_string(m.n_items) +
                                            " items of dimension " + std::to_string(m.dim));
  }
  if (m.data.size() != m.n_items * m.dim) {
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(m.n_items * m.dim) +
                                              " values, got " + std::to_string(m.data.size()));
  }
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (!std::isfinite(m.data[i])) {
      throw Error(ErrorCode::NonFinite, "non-finite feature value at flat index " + std::to_string(i));
    }
  }
}

void validate_distance_matrix(const DistanceMatrix& d, bool require_square) {
  if (d.rows == 0 || d.cols == 0) {
    throw Error(ErrorCode::EmptyMatrix, "distance matrix is empty");
  }
  if (d.data.size() != d.rows * d.cols) {
    throw Error(ErrorCode::ShapeMismatch, "distance payload does not match its shape");
  }
  if (require_square && !d.is_square()) {
    throw Error(ErrorCode::ShapeMismatch, "expected a square distance matrix, got " +
                                              std::to_string(d.rows) + "x" + std::to_string(d.cols));
  }
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    if (!std::isfinite(d.data[i])) {
      throw Error(ErrorCode::NonFinite, "non-finite distance at flat index " + std::to_string(i));
    }
    if (d.data[i] < 0.0) {
      throw Error(ErrorCode::InvalidDistance, "negative distance at flat index " + std::to_string(i));
    }
  }
  if (!require_square) return;
  for (std::size_t i = 0; i < d.rows; ++i) {
    if (d(i, i) != 0.0) {
      throw Error(ErrorCode::InvalidDistance, "non-zero diagonal at row " + std::to_string(i));
    }
    for (std::size_t j = i + 1; j < d.cols; ++j) {
      if (d(i, j) != d(j, i)) {
        throw Error(ErrorCode::InvalidDistance, "asymmetric entry (" + std::to_string(i) + ", " +
                                                    std::to_string(j) + ")");
      }
    }
  }
}

void validate_params(const EcnParams& p, std::size_t n_items) {
  if (p.t < 1) throw Error(ErrorCode::InvalidParams, "t must be >= 1");
  if (p.k < 1) throw Error(ErrorCode::InvalidParams, "k must be >= 1");
  // Neighbor picks skip the item itself, so at most n_items - 1 are available.
  if (p.m() > n_items || p.t >= n_items || p.q >= n_items) {
    throw Error(ErrorCode::ParamsTooLarge,
                "t=" + std::to_string(p.t) + ", q=" + std::to_string(p.q) + " needs M=" +
                    std::to_string(p.m()) + " neighbors but only " + std::to_string(n_items) +
                    " items are available");
  }
}

std::vector<index_t> positions_from_order(std::span<const index_t> order, std::size_t n_items) {
  if (order.size() != n_items * n_items) {
    throw Error(ErrorCode::ShapeMismatch, "order must be n_items x n_items");
  }
  std::vector<index_t> pos(n_items * n_items, 0);
  for (std::size_t i = 0; i < n_items; ++i) {
    for (std::size_t r = 0; r < n_items; ++r) {
      const auto b = static_cast<std::size_t>(order[i * n_items + r]);
      pos[i * n_items + b] = static_cast<index_t>(r + 1);
    }
  }
  return pos;
}

std::vector<index_t> order_from_positions(std::span<const index_t> pos, std::size_t n_items) {
  if (pos.size() != n_items * n_items) {
    throw Error(ErrorCode::ShapeMismatch, "pos must be n_items x n_items");
  }
  std::vector<index_t> order(n_items * n_items, 0);
  for (std::size_t i = 0; i < n_items; ++i) {
    for (std::size_t b = 0; b < n_items; ++b) {
      const auto r = static_cast<std::size_t>(pos[i * n_items + b]) - 1;
      order[i * n_items + r] = static_cast<index_t>(b);
    }
  }
  return order;
}

std::vector<index_t> indices_with_role(const EvalRecords& records, Role role) {
  std::vector<index_t> out;
  for (const auto& r : records) {
    if (r.role == role) out.push_back(r.item_index);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::RankDistOnly: return "rank-dist";
    case Method::EcnOrigDist: return "ecn-orig";
    case Method::EcnRankDist: return "ecn-rank";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "none") return Method::None;
  if (name == "rank-dist") return Method::RankDistOnly;
  if (name == "ecn-orig") return Method::EcnOrigDist;
  if (name == "ecn-rank") return Method::EcnRankDist;
  throw Error(ErrorCode::InvalidParams, "unknown method '" + std::string(name) + "'");
}

namespace {
std::atomic<int> g_num_threads{0};
}

void set_num_threads(int n) { g_num_threads.store(n < 0 ? 0 : n); }

int num_threads() {
  const int n = g_num_threads.load();
  return n > 0 ? n : omp_get_max_threads();
}

}  // namespace ecn
