#pragma once

#include <span>
#include <vector>

#include "ecn/core.hpp"

namespace ecn {

/// Squared euclidean distances between all rows of `features`.
///
/// Uses ||x||^2 + ||y||^2 - 2 x.y with double-precision dot products in a
/// fixed reduction order; cancellation below zero is clamped. The result is exactly
/// symmetric with a zero diagonal and does not depend on the thread count.
DistanceMatrix pairwise_sq_euclidean(const FeatureMatrix& features);

/// Squared euclidean distance between rows of one feature matrix, with the
/// rows widened to double and their squared norms precomputed. Entries are
/// bit-identical to pairwise_sq_euclidean.
class SqEuclideanKernel {
public:
  explicit SqEuclideanKernel(const FeatureMatrix& features);

  std::size_t n_items() const { return n_items_; }
  double operator()(std::size_t i, std::size_t j) const;
  /// Distances from item i to every item.
  void row(std::size_t i, std::span<double> out) const;

private:
  std::size_t n_items_;
  std::size_t dim_;
  std::vector<double> rows_;
  std::vector<double> norms_;
};

/// Cosine distances 1 - cos(x, y), clamped to [0, 2]. Throws ZeroNormRow.
DistanceMatrix pairwise_cosine(const FeatureMatrix& features);

}  // namespace ecn
