#include "ntksketch/osnap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/random.hpp"

namespace ntksketch {

OsnapSketch::OsnapSketch(std::size_t input_dim, std::size_t output_dim, std::uint64_t seed,
                         std::size_t sparsity)
    : input_dim_(input_dim), output_dim_(output_dim), seed_(seed) {
  if (input_dim == 0 || output_dim == 0) {
    throw ParameterError("OSNAP dimensions must be positive");
  }
  if (sparsity == 0) throw ParameterError("OSNAP sparsity must be positive");
  sparsity_ = std::min(sparsity, output_dim);

  RandomStream rng(seed, 0);
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(sparsity_));
  rows_.resize(input_dim_ * sparsity_);
  values_.resize(input_dim_ * sparsity_);
  for (std::size_t col = 0; col < input_dim_; ++col) {
    for (std::size_t b = 0; b < sparsity_; ++b) {
      // Block b covers [b*m/s, (b+1)*m/s); blocks are non-empty because s <= m.
      const std::size_t begin = b * output_dim_ / sparsity_;
      const std::size_t end = (b + 1) * output_dim_ / sparsity_;
      rows_[col * sparsity_ + b] = static_cast<std::uint32_t>(begin + rng.next_below(end - begin));
      values_[col * sparsity_ + b] = magnitude * rng.next_sign();
    }
  }
}

std::span<const std::uint32_t> OsnapSketch::column_rows(std::size_t column) const {
  if (column >= input_dim_) throw DimensionError("OSNAP column index out of range");
  return std::span<const std::uint32_t>(rows_).subspan(column * sparsity_, sparsity_);
}

std::span<const double> OsnapSketch::column_values(std::size_t column) const {
  if (column >= input_dim_) throw DimensionError("OSNAP column index out of range");
  return std::span<const double>(values_).subspan(column * sparsity_, sparsity_);
}

void OsnapSketch::add_column(std::size_t column, double weight, std::span<double> out) const {
  const std::uint32_t* rows = rows_.data() + column * sparsity_;
  const double* values = values_.data() + column * sparsity_;
  for (std::size_t b = 0; b < sparsity_; ++b) out[rows[b]] += values[b] * weight;
}

std::vector<double> OsnapSketch::apply(std::span<const double> x) const {
  std::vector<double> out(output_dim_);
  apply(x, out);
  return out;
}

void OsnapSketch::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != input_dim_) {
    throw DimensionError("OsnapSketch::apply: expected dimension " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.size()));
  }
  if (out.size() != output_dim_) throw DimensionError("OsnapSketch::apply: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) add_column(j, x[j], out);
  }
}

void OsnapSketch::apply(const SparseVector& x, std::span<double> out) const {
  if (x.dim != input_dim_) {
    throw DimensionError("OsnapSketch::apply: expected dimension " + std::to_string(input_dim_) +
                         ", got " + std::to_string(x.dim));
  }
  if (x.indices.size() != x.values.size()) {
    throw DimensionError("SparseVector: indices and values differ in length");
  }
  if (out.size() != output_dim_) throw DimensionError("OsnapSketch::apply: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    if (x.indices[k] >= input_dim_) throw DimensionError("SparseVector index out of range");
    add_column(x.indices[k], x.values[k], out);
  }
}

void OsnapSketch::apply_basis(std::span<double> out) const {
  if (out.size() != output_dim_) throw DimensionError("OsnapSketch::apply: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  add_column(0, 1.0, out);
}

}  // namespace ntksketch
