#include "ecn/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"

namespace ecn {
namespace {

// Four interleaved partial sums combined in a fixed order. The reduction
// order depends only on the dimension, so dot(a, b) == dot(b, a) bit for bit
// and results never depend on threading.
template <typename T>
double dot(std::span<const T> a, std::span<const T> b) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = a.size();
  std::size_t d = 0;
  for (; d + 4 <= n; d += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      s[l] += static_cast<double>(a[d + l]) * static_cast<double>(b[d + l]);
    }
  }
  for (; d < n; ++d) s[d % 4] += static_cast<double>(a[d]) * static_cast<double>(b[d]);
  return (s[0] + s[1]) + (s[2] + s[3]);
}

constexpr std::size_t kTile = 64;

// Fills the upper triangle with fn(i, j) and mirrors it, one tile pair at a
// time so both writes stay cache-local.
template <typename Fn>
DistanceMatrix symmetric_fill(std::size_t n, Fn&& fn) {
  DistanceMatrix out(n, n);
  const std::size_t tiles = (n + kTile - 1) / kTile;
  detail::parallel_for(tiles, [&](std::size_t ti) {
    const std::size_t i0 = ti * kTile;
    const std::size_t i1 = std::min(n, i0 + kTile);
    for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
      const std::size_t j1 = std::min(n, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) out(i, j) = fn(i, j);
      }
      for (std::size_t j = j0; j < j1; ++j) {
        for (std::size_t i = i0; i < std::min(i1, j); ++i) out(j, i) = out(i, j);
      }
    }
  });
  return out;
}

}  // namespace

SqEuclideanKernel::SqEuclideanKernel(const FeatureMatrix& features)
    : n_items_(features.n_items),
      dim_(features.dim),
      rows_(features.data.begin(), features.data.end()),
      norms_(features.n_items) {
  validate_feature_matrix(features);
  for (std::size_t i = 0; i < n_items_; ++i) {
    const std::span<const double> r(rows_.data() + i * dim_, dim_);
    norms_[i] = dot(r, r);
  }
}

double SqEuclideanKernel::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const std::span<const double> a(rows_.data() + i * dim_, dim_);
  const std::span<const double> b(rows_.data() + j * dim_, dim_);
  return std::max(norms_[i] + norms_[j] - 2.0 * dot(a, b), 0.0);
}

void SqEuclideanKernel::row(std::size_t i, std::span<double> out) const {
  for (std::size_t j = 0; j < n_items_; ++j) out[j] = (*this)(i, j);
}

DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& features) {
  const SqEuclideanKernel kernel(features);
  return symmetric_fill(features.n_items, kernel);
}

DistanceMatrix pairwise_cosine(const FeatureMatrix& features) {
  validate_feature_matrix(features);
  std::vector<double> norms(features.n_items);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    norms[i] = dot(features.row(i), features.row(i));
    if (norms[i] == 0.0) {
      throw Error(ErrorCode::ZeroNormRow, "row " + std::to_string(i) + " has zero norm");
    }
    norms[i] = std::sqrt(norms[i]);
  }
  return symmetric_fill(features.n_items, [&](std::size_t i, std::size_t j) {
    const double v = 1.0 - dot(features.row(i), features.row(j)) / (norms[i] * norms[j]);
    return std::clamp(v, 0.0, 2.0);
  });
}

}  // namespace ecn
