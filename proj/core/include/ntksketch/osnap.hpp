#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ntksketch {

/// Sparse vector in coordinate form. Indices need not be sorted; duplicates are summed.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
};

/// OSNAP sparse embedding: every input coordinate j is hashed to exactly `sparsity` distinct
/// output rows with weights +-1/sqrt(sparsity). Rows for one column come from disjoint blocks of
/// the output range, which keeps them distinct. Cost of apply is sparsity * nnz(x).
class OsnapSketch {
 public:
  static constexpr std::size_t kDefaultSparsity = 8;

  /// `sparsity` is clamped to output_dim when the output is smaller than the requested sparsity.
  OsnapSketch(std::size_t input_dim, std::size_t output_dim, std::uint64_t seed,
              std::size_t sparsity = kDefaultSparsity);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t sparsity() const noexcept { return sparsity_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Output rows hit by input column `column` (length sparsity()).
  std::span<const std::uint32_t> column_rows(std::size_t column) const;
  /// Entries of column `column`, parallel to column_rows(); each is +-1/sqrt(sparsity()).
  std::span<const double> column_values(std::size_t column) const;

  std::vector<double> apply(std::span<const double> x) const;
  /// Dense input, skipping exact zeros. `out` has output_dim() entries and is overwritten.
  void apply(std::span<const double> x, std::span<double> out) const;
  void apply(const SparseVector& x, std::span<double> out) const;
  /// Image of the first standard basis vector.
  void apply_basis(std::span<double> out) const;

 private:
  void add_column(std::size_t column, double weight, std::span<double> out) const;

  std::size_t input_dim_;
  std::size_t output_dim_;
  std::size_t sparsity_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> rows_;   // input_dim * sparsity
  std::vector<double> values_;        // input_dim * sparsity
};

}  // namespace ntksketch
