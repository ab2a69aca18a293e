#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ntksketch {

/// Dense rows x cols matrix with i.i.d. N(0, 1/rows) entries, so E||Gx||^2 = ||x||^2.
class GaussianMatrix {
 public:
  GaussianMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> entries() const noexcept { return entries_; }  // row-major

  std::vector<double> apply(std::span<const double> x) const;
  void apply(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

}  // namespace ntksketch
