#include "ntksketch/fwht.hpp"

#include <string>

#include "ntksketch/error.hpp"

namespace ntksketch {

namespace {

// Radix-2 butterflies; the first two stages are fused since h = 1, 2 have
// inner loops too short to vectorize.
void butterflies(double* data, std::size_t n) {
  if (n >= 4) {
    for (std::size_t i = 0; i < n; i += 4) {
      const double a = data[i], b = data[i + 1], c = data[i + 2], d = data[i + 3];
      const double s0 = a + b, d0 = a - b, s1 = c + d, d1 = c - d;
      data[i] = s0 + s1;
      data[i + 1] = d0 + d1;
      data[i + 2] = s0 - s1;
      data[i + 3] = d0 - d1;
    }
  } else if (n == 2) {
    const double a = data[0], b = data[1];
    data[0] = a + b;
    data[1] = a - b;
    return;
  } else {
    return;
  }
  for (std::size_t h = 4; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      double* lo = data + i;
      double* hi = data + i + h;
      for (std::size_t j = 0; j < h; ++j) {
        const double x = lo[j];
        const double y = hi[j];
        lo[j] = x + y;
        hi[j] = x - y;
      }
    }
  }
}

}  // namespace

void fwht_inplace(std::span<double> v) {
  if (!is_power_of_two(v.size())) {
    throw DimensionError("fwht: length " + std::to_string(v.size()) + " is not a power of two");
  }
  butterflies(v.data(), v.size());
}

std::vector<double> fwht(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  fwht_inplace(out);
  return out;
}

}  // namespace ntksketch
