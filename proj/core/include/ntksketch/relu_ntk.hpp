#pragma once

#include <span>
#include <vector>

namespace ntksketch {

/// Slack allowed outside [-1, 1] before a cosine argument is rejected; inside the band the value
/// is clamped. Cosines of unit vectors routinely overshoot 1 by a few ulps.
inline constexpr double kCosineTolerance = 1e-9;

/// First-order arc-cosine kernel (1/pi)(sqrt(1-a^2) + a(pi - arccos a)). Increasing, [0, 1].
double kappa1(double alpha);

/// Zeroth-order arc-cosine kernel (1/pi)(pi - arccos a); the derivative of kappa1.
double kappa0(double alpha);

/// Per-layer values of the ReLU-NTK recursion at a single cosine.
struct NtkScalarTrace {
  int depth = 0;
  std::vector<double> sigma;      // Sigma^(h), h = 0..L
  std::vector<double> sigma_dot;  // dSigma^(h), h = 0..L; entry 0 unused (0)
  std::vector<double> ntk;        // K^(h), h = 0..L

  double value() const { return ntk.back(); }
};

/// Sigma^(h) = kappa1^{(h)}(alpha), dSigma^(h) = kappa0(Sigma^(h-1)),
/// K^(h) = K^(h-1) dSigma^(h) + Sigma^(h), with K^(0) = alpha.
NtkScalarTrace k_relu_trace(int depth, double alpha);

/// K^(L)(alpha) without keeping the trace.
double k_relu(int depth, double alpha);

/// Exact depth-L ReLU NTK: ||y|| ||z|| K^(L)(<y,z> / (||y|| ||z||)).
/// Throws ZeroInputError if either vector is zero, DimensionError on size mismatch.
double theta_ntk(int depth, std::span<const double> y, std::span<const double> z);

}  // namespace ntksketch
