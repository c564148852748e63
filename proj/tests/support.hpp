#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "ecn/core.hpp"

namespace ecn::test {

inline FeatureMatrix random_features(std::size_t n, std::size_t dim, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  FeatureMatrix f;
  f.n_items = n;
  f.dim = dim;
  f.data.resize(n * dim);
  for (float& v : f.data) v = normal(rng);
  return f;
}

inline FeatureMatrix make_features(std::size_t n, std::size_t dim, std::vector<float> values) {
  return FeatureMatrix{n, dim, std::move(values)};
}

/// n_queries queries first, then gallery; person/camera ids arbitrary.
inline EvalRecords split_records(std::size_t n, std::size_t n_queries) {
  EvalRecords r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i].item_index = static_cast<index_t>(i);
    r[i].person_id = static_cast<std::int64_t>(i % 7) + 1;
    r[i].camera_id = static_cast<std::int64_t>(i % 3);
    r[i].role = i < n_queries ? Role::Query : Role::Gallery;
  }
  return r;
}

inline bool close_rel(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ecn_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

}  // namespace ecn::test
