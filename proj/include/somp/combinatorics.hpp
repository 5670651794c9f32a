#pragma once

#include "somp/types.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace somp {

/// Default ceiling on the number of subsets any exhaustive enumeration visits.
inline constexpr std::uint64_t kDefaultCombinationGuard = 1'000'000;

/// C(n, k), or nullopt when it does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result == C(n - k + i - 1, i - 1), so the division below is exact.
    const unsigned __int128 wide = static_cast<unsigned __int128>(result) * (n - k + i) / i;
    if (wide > UINT64_MAX) return std::nullopt;
    result = static_cast<std::uint64_t>(wide);
  }
  return result;
}

/// Calls fn(positions) for every size-k subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_combination(Index n, Index k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<Index> pos(static_cast<std::size_t>(k));
  std::iota(pos.begin(), pos.end(), Index{0});
  for (;;) {
    fn(static_cast<const std::vector<Index>&>(pos));
    Index i = k - 1;
    while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++pos[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace somp
