#include <doctest.h>

#include <cmath>

#include "ecn/distance.hpp"
#include "support.hpp"

using namespace ecn;

namespace {

DistanceMatrix naive_sq_euclidean(const FeatureMatrix& f) {
  DistanceMatrix d(f.n_items, f.n_items);
  for (std::size_t i = 0; i < f.n_items; ++i) {
    for (std::size_t j = 0; j < f.n_items; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < f.dim; ++k) {
        const double diff = static_cast<double>(f.row(i)[k]) - f.row(j)[k];
        s += diff * diff;
      }
      d(i, j) = s;
    }
  }
  return d;
}

DistanceMatrix naive_cosine(const FeatureMatrix& f) {
  DistanceMatrix d(f.n_items, f.n_items);
  for (std::size_t i = 0; i < f.n_items; ++i) {
    for (std::size_t j = 0; j < f.n_items; ++j) {
      double xy = 0, xx = 0, yy = 0;
      for (std::size_t k = 0; k < f.dim; ++k) {
        const double x = f.row(i)[k], y = f.row(j)[k];
        xy += x * y;
        xx += x * x;
        yy += y * y;
      }
      d(i, j) = i == j ? 0.0 : 1.0 - xy / std::sqrt(xx * yy);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("squared euclidean on a line") {
  const auto d = pairwise_sq_euclidean(test::make_features(3, 1, {0, 1, 3}));
  CHECK(d.data == std::vector<double>{0, 1, 9, 1, 0, 4, 9, 4, 0});
}

TEST_CASE("identical rows are at distance zero") {
  const auto d = pairwise_sq_euclidean(test::make_features(3, 3, {0.3f, -1.7f, 2.2f, 0.3f, -1.7f, 2.2f,
                                                                  0.3f, -1.7f, 2.2f}));
  for (double v : d.data) CHECK(v == 0.0);
}

TEST_CASE("squared euclidean matches the naive double loop") {
  const auto f = test::random_features(50, 8, 3);
  const auto fast = pairwise_sq_euclidean(f);
  const auto slow = naive_sq_euclidean(f);
  for (std::size_t i = 0; i < fast.data.size(); ++i) CHECK(std::abs(fast.data[i] - slow.data[i]) <= 1e-10);
}

TEST_CASE("distance matrix invariants hold for arbitrary features") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed * 7 % 90;
    const std::size_t dim = 1 + seed % 13;
    auto f = test::random_features(n, dim, seed);
    if (seed % 4 == 0 && n > 1) {
      // plant a duplicate row
      std::copy_n(f.data.begin(), dim, f.data.begin() + static_cast<std::ptrdiff_t>(dim));
    }
    const auto d = pairwise_sq_euclidean(f);
    CHECK_NOTHROW(validate_distance_matrix(d, true));
    if (seed % 4 == 0 && n > 1) CHECK(d(0, 1) == 0.0);
  }
}

TEST_CASE("kernel rows are bit-identical to the matrix") {
  const auto f = test::random_features(70, 11, 5);
  const auto d = pairwise_sq_euclidean(f);
  const SqEuclideanKernel kernel(f);
  std::vector<double> row(70);
  for (std::size_t i = 0; i < 70; ++i) {
    kernel.row(i, row);
    for (std::size_t j = 0; j < 70; ++j) CHECK(row[j] == d(i, j));
  }
}

TEST_CASE("distances do not depend on the thread count") {
  const auto f = test::random_features(300, 24, 9);
  set_num_threads(1);
  const auto one = pairwise_sq_euclidean(f);
  const auto cos_one = pairwise_cosine(f);
  set_num_threads(4);
  const auto four = pairwise_sq_euclidean(f);
  const auto cos_four = pairwise_cosine(f);
  set_num_threads(0);
  CHECK(one.data == four.data);
  CHECK(cos_one.data == cos_four.data);
}

TEST_CASE("cosine distance") {
  SUBCASE("orthogonal unit vectors") {
    const auto d = pairwise_cosine(test::make_features(2, 2, {1, 0, 0, 1}));
    CHECK(d(0, 1) == 1.0);
  }
  SUBCASE("identical vectors") {
    const auto d = pairwise_cosine(test::make_features(2, 3, {1, 2, 3, 1, 2, 3}));
    CHECK(std::abs(d(0, 1)) <= 1e-15);
    CHECK(d(0, 0) == 0.0);
  }
  SUBCASE("opposite vectors clamp at 2") {
    const auto d = pairwise_cosine(test::make_features(2, 1, {1, -1}));
    CHECK(d(0, 1) == 2.0);
  }
  SUBCASE("random matches naive oracle") {
    const auto f = test::random_features(20, 4, 21);
    const auto fast = pairwise_cosine(f);
    const auto slow = naive_cosine(f);
    for (std::size_t i = 0; i < fast.data.size(); ++i) {
      CHECK(std::abs(fast.data[i] - slow.data[i]) <= 1e-10);
    }
  }
  SUBCASE("zero-norm row") {
    try {
      pairwise_cosine(test::make_features(3, 2, {1, 0, 0, 0, 0, 1}));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroNormRow);
      CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
  }
}
