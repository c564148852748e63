#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "ecn/core.hpp"
#include "support.hpp"

using namespace ecn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ecn::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("validate_feature_matrix") {
  SUBCASE("well-formed") {
    CHECK_NOTHROW(validate_feature_matrix(test::make_features(2, 3, {1, 2, 3, 4, 5, 6})));
  }
  SUBCASE("NaN names its flat index") {
    auto m = test::make_features(2, 3, {1, 2, 3, 4, 5, 6});
    m.data[4] = std::numeric_limits<float>::quiet_NaN();
    try {
      validate_feature_matrix(m);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFinite);
      CHECK(std::string(e.what()).find("flat index 4") != std::string::npos);
    }
  }
  SUBCASE("infinity") {
    auto m = test::make_features(1, 2, {0, std::numeric_limits<float>::infinity()});
    CHECK(code_of([&] { validate_feature_matrix(m); }) == ErrorCode::NonFinite);
  }
  SUBCASE("empty") {
    CHECK(code_of([] { validate_feature_matrix(FeatureMatrix{0, 3, {}}); }) == ErrorCode::EmptyMatrix);
  }
  SUBCASE("shape mismatch") {
    CHECK(code_of([] { validate_feature_matrix(FeatureMatrix{2, 2, {1, 2, 3}}); }) ==
          ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("validate_distance_matrix") {
  DistanceMatrix d(2, 2);
  d(0, 1) = d(1, 0) = 3.0;
  CHECK_NOTHROW(validate_distance_matrix(d, true));

  auto asym = d;
  asym(0, 1) = 2.0;
  CHECK(code_of([&] { validate_distance_matrix(asym, true); }) == ErrorCode::InvalidDistance);

  auto diag = d;
  diag(1, 1) = 0.5;
  CHECK(code_of([&] { validate_distance_matrix(diag, true); }) == ErrorCode::InvalidDistance);

  auto neg = d;
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK(code_of([&] { validate_distance_matrix(neg, true); }) == ErrorCode::InvalidDistance);

  CHECK(code_of([] { validate_distance_matrix(DistanceMatrix(2, 3), true); }) == ErrorCode::ShapeMismatch);
  CHECK_NOTHROW(validate_distance_matrix(DistanceMatrix(2, 3), false));
}

TEST_CASE("validate_params") {
  EcnParams p;  // t=3, q=8 -> M=27
  CHECK_NOTHROW(validate_params(p, 27));
  CHECK(code_of([&] { validate_params(p, 26); }) == ErrorCode::ParamsTooLarge);
  p.t = 0;
  CHECK(code_of([&] { validate_params(p, 100); }) == ErrorCode::InvalidParams);
  p.t = 1;
  p.k = 0;
  CHECK(code_of([&] { validate_params(p, 100); }) == ErrorCode::InvalidParams);
  // q=0, t=n: only n-1 items besides self
  EcnParams top;
  top.t = 5;
  top.q = 0;
  CHECK(code_of([&] { validate_params(top, 5); }) == ErrorCode::ParamsTooLarge);
  CHECK_NOTHROW(validate_params(top, 6));
}

TEST_CASE("order and positions are inverse maps") {
  std::mt19937 rng(11);
  for (std::size_t n : {1u, 2u, 7u, 31u}) {
    std::vector<index_t> order(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = order.begin() + static_cast<std::ptrdiff_t>(i * n);
      std::iota(row, row + static_cast<std::ptrdiff_t>(n), index_t{0});
      std::shuffle(row, row + static_cast<std::ptrdiff_t>(n), rng);
    }
    const auto pos = positions_from_order(order, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < n; ++r) {
        CHECK(pos[i * n + static_cast<std::size_t>(order[i * n + r])] == static_cast<index_t>(r + 1));
      }
    }
    CHECK(order_from_positions(pos, n) == order);
  }
}

TEST_CASE("methods parse and print") {
  for (const auto m : {Method::None, Method::RankDistOnly, Method::EcnOrigDist, Method::EcnRankDist}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(code_of([] { parse_method("jaccard"); }) == ErrorCode::InvalidParams);
}

TEST_CASE("indices_with_role sorts by item") {
  EvalRecords r{{3, 1, 0, Role::Query}, {0, 1, 1, Role::Gallery}, {1, 2, 0, Role::Query}};
  CHECK(indices_with_role(r, Role::Query) == std::vector<index_t>{1, 3});
  CHECK(indices_with_role(r, Role::Gallery) == std::vector<index_t>{0});
}
