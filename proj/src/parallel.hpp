#pragma once

#include <cstddef>
#include <cstdint>

#include "ecn/core.hpp"

namespace ecn::detail {

/// Runs fn(i) for i in [0, n). Every index is handled by exactly one worker;
/// results must not depend on which one.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(num_threads())
  for (std::int64_t i = 0; i < count; ++i) {
    fn(static_cast<std::size_t>(i));
  }
}

}  // namespace ecn::detail
