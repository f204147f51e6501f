#include "gbam/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gbam {

double RandomStream::exponential(double mean) {
  if (mean == 0.0) return 0.0;
  // 1 - u lies in (0, 1], so the log is finite.
  return -mean * std::log1p(-uniform01());
}

std::uint64_t RandomStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return next_u64();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return lo + x % range;
}

}  // namespace gbam
