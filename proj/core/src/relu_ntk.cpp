#include "ntksketch/relu_ntk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ntksketch/error.hpp"

namespace ntksketch {

namespace {

double clamp_cosine(double alpha) {
  if (!(alpha >= -1.0 - kCosineTolerance && alpha <= 1.0 + kCosineTolerance)) {
    throw DomainError("arc-cosine kernel argument " + std::to_string(alpha) +
                      " outside [-1, 1]");
  }
  return std::clamp(alpha, -1.0, 1.0);
}

void check_depth(int depth) {
  if (depth < 0) throw ParameterError("depth must be non-negative");
}

// Layer-one values from the angle between the inputs, which stays exact for parallel inputs where
// arccos of a rounded cosine would lose half the digits.
struct FirstLayer {
  double cosine, sigma, sigma_dot;
};

FirstLayer first_layer_from_angle(double angle) {
  const double c = std::cos(angle);
  return {c, (std::sin(angle) + (std::numbers::pi - angle) * c) / std::numbers::pi,
          (std::numbers::pi - angle) / std::numbers::pi};
}

double k_relu_from_angle(int depth, double angle) {
  const FirstLayer first = first_layer_from_angle(angle);
  if (depth == 0) return first.cosine;
  double sigma = first.sigma;
  double k = first.cosine * first.sigma_dot + sigma;
  for (int h = 2; h <= depth; ++h) {
    const double sigma_dot = kappa0(sigma);
    sigma = kappa1(sigma);
    k = k * sigma_dot + sigma;
  }
  return k;
}

}  // namespace

double kappa1(double alpha) {
  const double a = clamp_cosine(alpha);
  return (std::sqrt(1.0 - a * a) + a * (std::numbers::pi - std::acos(a))) / std::numbers::pi;
}

double kappa0(double alpha) {
  const double a = clamp_cosine(alpha);
  return (std::numbers::pi - std::acos(a)) / std::numbers::pi;
}

NtkScalarTrace k_relu_trace(int depth, double alpha) {
  check_depth(depth);
  const double a = clamp_cosine(alpha);
  NtkScalarTrace trace;
  trace.depth = depth;
  trace.sigma.resize(depth + 1);
  trace.sigma_dot.assign(depth + 1, 0.0);
  trace.ntk.resize(depth + 1);
  trace.sigma[0] = a;
  trace.ntk[0] = a;
  for (int h = 1; h <= depth; ++h) {
    trace.sigma[h] = kappa1(trace.sigma[h - 1]);
    trace.sigma_dot[h] = kappa0(trace.sigma[h - 1]);
    trace.ntk[h] = trace.ntk[h - 1] * trace.sigma_dot[h] + trace.sigma[h];
  }
  return trace;
}

double k_relu(int depth, double alpha) {
  check_depth(depth);
  double sigma = clamp_cosine(alpha);
  double k = sigma;
  for (int h = 1; h <= depth; ++h) {
    const double sigma_dot = kappa0(sigma);
    sigma = kappa1(sigma);
    k = k * sigma_dot + sigma;
  }
  return k;
}

double theta_ntk(int depth, std::span<const double> y, std::span<const double> z) {
  if (y.size() != z.size()) {
    throw DimensionError("theta_ntk: dimensions " + std::to_string(y.size()) + " and " +
                         std::to_string(z.size()) + " differ");
  }
  double yy = 0.0, zz = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    yy += y[i] * y[i];
    zz += z[i] * z[i];
  }
  if (yy == 0.0 || zz == 0.0) throw ZeroInputError("theta_ntk: zero-norm input");
  check_depth(depth);
  const double ny = std::sqrt(yy), nz = std::sqrt(zz);
  double diff = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = y[i] / ny, b = z[i] / nz;
    diff += (a - b) * (a - b);
    sum += (a + b) * (a + b);
  }
  const double angle = 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
  return ny * nz * k_relu_from_angle(depth, angle);
}

}  // namespace ntksketch
