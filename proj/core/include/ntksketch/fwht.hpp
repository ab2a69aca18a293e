#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ntksketch {

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

/// Smallest power of two >= n (n = 0 maps to 1).
constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place unnormalized Walsh-Hadamard transform, v <- H v, with H the Sylvester-ordered
/// Hadamard matrix (entries +-1). Applying it twice multiplies v by v.size().
/// Throws DimensionError unless v.size() is a power of two.
void fwht_inplace(std::span<double> v);

/// Out-of-place variant of fwht_inplace.
std::vector<double> fwht(std::span<const double> v);

}  // namespace ntksketch
