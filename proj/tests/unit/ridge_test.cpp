#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ntksketch/error.hpp"
#include "ntksketch/labels.hpp"
#include "ntksketch/ridge.hpp"

namespace ntksketch {
namespace {

DenseMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  DenseMatrix m(rows, cols);
  m.values = std::move(values);
  return m;
}

TEST(Ridge, IdentityDesignRecoversTargets) {
  DenseMatrix z(3, 3);
  for (std::size_t i = 0; i < 3; ++i) z(i, i) = 1.0;
  const auto y = matrix(3, 2, {1, 2, 3, 4, 5, 6});
  const auto model = ridge_fit(z, y, 0.0);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(model.weights.values[k], y.values[k], 1e-14);
}

TEST(Ridge, StrongRegularizationShrinksToZero) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  DenseMatrix z(20, 4), y(20, 1);
  for (double& v : z.values) v = normal(rng);
  for (double& v : y.values) v = normal(rng);
  const auto model = ridge_fit(z, y, 1e9);
  double norm = 0.0;
  for (double v : model.weights.values) norm += v * v;
  EXPECT_LT(std::sqrt(norm), 1e-6);
}

TEST(Ridge, MatchesClosedFormOnToySystem) {
  // 3 x 2 design; solve (Z^T Z + lambda I) w = Z^T y by hand with the 2 x 2 inverse.
  const auto z = matrix(3, 2, {1.0, 2.0, 0.5, -1.0, 3.0, 0.0});
  const auto y = matrix(3, 1, {1.0, 0.0, 2.0});
  const double lambda = 0.1;
  const double a = 1.0 + 0.25 + 9.0 + lambda, b = 2.0 - 0.5, d = 4.0 + 1.0 + lambda;
  const double r0 = 1.0 + 6.0, r1 = 2.0;
  const double det = a * d - b * b;
  const double w0 = (d * r0 - b * r1) / det, w1 = (a * r1 - b * r0) / det;
  const auto model = ridge_fit(z, y, lambda);
  EXPECT_NEAR(model.weights(0, 0), w0, 1e-13);
  EXPECT_NEAR(model.weights(1, 0), w1, 1e-13);
  EXPECT_EQ(model.lambda, lambda);
}

TEST(Ridge, SingularSystemAtZeroLambda) {
  const auto z = matrix(3, 2, {1.0, 2.0, 2.0, 4.0, -1.0, -2.0});
  const auto y = matrix(3, 1, {1.0, 2.0, 3.0});
  EXPECT_THROW(ridge_fit(z, y, 0.0), SolveError);
  EXPECT_NO_THROW(ridge_fit(z, y, 0.5));
}

TEST(Ridge, ArgumentErrors) {
  const auto z = matrix(2, 1, {1.0, 2.0});
  const auto y = matrix(3, 1, {1.0, 2.0, 3.0});
  EXPECT_THROW(ridge_fit(z, y, 0.1), DimensionError);
  EXPECT_THROW(ridge_fit(z, matrix(2, 1, {1.0, 2.0}), -1.0), ParameterError);
  const auto model = ridge_fit(z, matrix(2, 1, {1.0, 2.0}), 0.1);
  EXPECT_THROW(predict(model, DenseMatrix(2, 3)), DimensionError);
}

TEST(Ridge, SeparableTwoClassProblem) {
  DenseMatrix z(40, 3);
  std::vector<std::int64_t> labels(40);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (std::size_t i = 0; i < 40; ++i) {
    labels[i] = static_cast<std::int64_t>(i % 2);
    const double sign = labels[i] == 1 ? 1.0 : -1.0;
    z(i, 0) = sign * u(rng);
    z(i, 1) = u(rng) - 1.0;
    z(i, 2) = 1.0;
  }
  const auto model = ridge_fit(z, encode_labels(labels, 2), lambda_presets::kWeak);
  EXPECT_EQ(accuracy(classify(model, z), labels), 1.0);
}

TEST(Ridge, InterpolatingModelReproducesTargets) {
  const auto z = matrix(2, 2, {1.0, 2.0, -1.0, 0.5});
  const auto y = matrix(2, 1, {3.0, -1.0});
  const auto model = ridge_fit(z, y, 0.0);
  const auto pred = predict(model, matrix(1, 2, {1.0, 2.0}));
  EXPECT_NEAR(pred(0, 0), 3.0, 1e-12);
}

TEST(Ridge, ArgmaxInvariantToPositiveScaling) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  DenseMatrix scores(30, 4);
  for (double& v : scores.values) v = normal(rng);
  DenseMatrix scaled = scores;
  for (double& v : scaled.values) v *= 7.5;
  EXPECT_EQ(argmax_rows(scores), argmax_rows(scaled));
  const auto ties = matrix(1, 3, {1.0, 1.0, 0.0});
  EXPECT_EQ(argmax_rows(ties)[0], 0u);
}

TEST(Ridge, LossNonIncreasingAsLambdaShrinks) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  DenseMatrix z(50, 8), y(50, 2);
  for (double& v : z.values) v = normal(rng);
  for (double& v : y.values) v = normal(rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {100.0, 10.0, 1.0, 0.3, 0.03, 0.01, 0.0}) {
    const double loss = training_loss(ridge_fit(z, y, lambda), z, y);
    EXPECT_LE(loss, prev * (1.0 + 1e-12));
    prev = loss;
  }
}

TEST(Ridge, AccuracyHelper) {
  const std::vector<std::size_t> pred = {0, 1, 1, 2};
  const std::vector<std::int64_t> truth = {0, 1, 0, 2};
  EXPECT_DOUBLE_EQ(accuracy(pred, truth), 0.75);
  const std::vector<std::int64_t> short_truth = {0};
  EXPECT_THROW(accuracy(pred, short_truth), DimensionError);
}

}  // namespace
}  // namespace ntksketch
