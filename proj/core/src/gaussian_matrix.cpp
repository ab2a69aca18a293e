#include "ntksketch/gaussian_matrix.hpp"

#include <cmath>

#include "ntksketch/error.hpp"
#include "ntksketch/random.hpp"

namespace ntksketch {

GaussianMatrix::GaussianMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw ParameterError("Gaussian matrix dimensions must be positive");
  RandomStream rng(seed, 0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  entries_.resize(rows * cols);
  for (double& e : entries_) e = scale * rng.next_normal();
}

std::vector<double> GaussianMatrix::apply(std::span<const double> x) const {
  std::vector<double> out(rows_);
  apply(x, out);
  return out;
}

void GaussianMatrix::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != cols_ || out.size() != rows_) {
    throw DimensionError("Gaussian matrix: input or output size mismatch");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = entries_.data() + i * cols_;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

}  // namespace ntksketch
