#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntksketch/feature_matrix.hpp"

namespace ntksketch {

/// Regularizer presets used for the image benchmarks.
namespace lambda_presets {
inline constexpr double kStrong = 0.3;
inline constexpr double kMedium = 0.03;
inline constexpr double kWeak = 0.01;
}  // namespace lambda_presets

struct RidgeModel {
  DenseMatrix weights;  // features x outputs
  double lambda = 0.0;
  std::size_t outputs = 0;  // t classes, or 1 for scalar regression
  bool classification = false;
};

/// w = (Z^T Z + lambda I)^{-1} Z^T Y. Cholesky on the regularized Gram, falling back to an
/// eigendecomposition. Throws SolveError when the system is singular (lambda = 0 with
/// rank-deficient Z), ParameterError for lambda < 0, DimensionError on row mismatch.
RidgeModel ridge_fit(const DenseMatrix& z, const DenseMatrix& y, double lambda);

/// Z_test w. Throws DimensionError if the feature count differs.
DenseMatrix predict(const RidgeModel& model, const DenseMatrix& z);

/// Row-wise argmax of predict(); ties go to the smallest index.
std::vector<std::size_t> classify(const RidgeModel& model, const DenseMatrix& z);

/// Row-wise argmax of an arbitrary score matrix.
std::vector<std::size_t> argmax_rows(const DenseMatrix& scores);

/// ||Z w - Y||_F^2 (without the penalty).
double training_loss(const RidgeModel& model, const DenseMatrix& z, const DenseMatrix& y);

/// Fraction of positions where the two vectors agree.
double accuracy(std::span<const std::size_t> predicted, std::span<const std::int64_t> truth);

}  // namespace ntksketch
