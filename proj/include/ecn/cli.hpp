#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecn/core.hpp"

namespace ecn::cli {

/// Runs the `ecn` command line. Returns the process exit code: 0 on success,
/// the numeric ErrorCode on library errors, 2 on usage errors, 1 otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::vector<std::size_t> sizes{2000, 4000, 8000};
  Method method = Method::EcnRankDist;
  EcnParams params;
  std::size_t runs = 3;
  std::size_t imgs_per_id = 4;
  std::size_t dim = 32;
  std::uint64_t seed = 7;
};

struct BenchRow {
  std::size_t n_items = 0;
  double seconds = 0.0;  ///< fastest run
  double median_seconds = 0.0;
};

/// Times rerank (from features) on synthetic clusters of each size.
std::vector<BenchRow> run_bench(const BenchOptions& options);

}  // namespace ecn::cli
