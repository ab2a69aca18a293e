#include "ntksketch/poly_approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/relu_ntk.hpp"

namespace ntksketch {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t checked_ceil(double x, const char* what) {
  if (!std::isfinite(x) || x > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw ParameterError(std::string(what) + " degree overflows");
  }
  // Guard against ceil(8.000000000001) on values that are integers in exact arithmetic.
  return static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12)));
}

}  // namespace

double KernelPolynomial::operator()(double alpha) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * alpha + *it;
  return acc;
}

std::vector<double> central_binomial_ratios(int n) {
  std::vector<double> t(n + 1);
  t[0] = 1.0;
  for (int i = 1; i <= n; ++i) t[i] = t[i - 1] * (2.0 * i - 1.0) / (2.0 * i);
  return t;
}

KernelPolynomial taylor_coeffs_kappa1(int p) {
  if (p < 0) throw ParameterError("kappa1 truncation level must be non-negative");
  KernelPolynomial poly;
  poly.target = PolyTarget::kappa1_taylor;
  poly.coefficients.assign(2 * p + 3, 0.0);
  poly.coefficients[0] = 1.0 / kPi;
  poly.coefficients[1] = 0.5;
  const auto t = central_binomial_ratios(p);
  for (int i = 0; i <= p; ++i) {
    poly.coefficients[2 * i + 2] = t[i] / (kPi * (2.0 * i + 1.0) * (2.0 * i + 2.0));
  }
  return poly;
}

KernelPolynomial taylor_coeffs_kappa0(int p_prime) {
  if (p_prime < 0) throw ParameterError("kappa0 truncation level must be non-negative");
  KernelPolynomial poly;
  poly.target = PolyTarget::kappa0_taylor;
  poly.coefficients.assign(2 * p_prime + 2, 0.0);
  poly.coefficients[0] = 0.5;
  const auto t = central_binomial_ratios(p_prime);
  for (int i = 0; i <= p_prime; ++i) {
    poly.coefficients[2 * i + 1] = t[i] / (kPi * (2.0 * i + 1.0));
  }
  return poly;
}

DegreeChoice choose_degrees(int depth, double eps) {
  if (depth < 1) throw ParameterError("depth must be at least 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in (0, 1]");
  const double l2 = static_cast<double>(depth) * depth;
  DegreeChoice out;
  out.p = checked_ceil(2.0 * l2 / std::pow(eps, 4.0 / 3.0), "kappa1");
  out.p_prime = checked_ceil(9.0 * l2 / (eps * eps), "kappa0");
  out.kappa1_error_bound = std::pow(1.0 / (9.0 * static_cast<double>(out.p)), 1.5);
  out.kappa0_error_bound = 1.0 / std::sqrt(26.0 * static_cast<double>(out.p_prime));
  return out;
}

std::int64_t kappa1_degree_for_error(double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  return checked_ceil(1.0 / (9.0 * std::pow(eps, 2.0 / 3.0)), "kappa1");
}

std::int64_t kappa0_degree_for_error(double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  return checked_ceil(1.0 / (26.0 * eps * eps), "kappa0");
}

double normalized_ntk(int depth, double alpha) {
  return k_relu(depth, alpha) / (depth + 1.0);
}

double sup_error(const KernelPolynomial& poly, const std::function<double(double)>& target,
                 std::size_t grid_size) {
  if (grid_size < 2) throw ParameterError("grid needs at least two points");
  double worst = 0.0;
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double a = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(grid_size - 1);
    worst = std::max(worst, std::abs(poly(a) - target(a)));
  }
  return worst;
}

double sup_error(const KernelPolynomial& poly, std::size_t grid_size) {
  switch (poly.target) {
    case PolyTarget::kappa1_taylor:
      return sup_error(poly, [](double a) { return kappa1(a); }, grid_size);
    case PolyTarget::kappa0_taylor:
      return sup_error(poly, [](double a) { return kappa0(a); }, grid_size);
    case PolyTarget::fitted_ntk: {
      const int depth = poly.depth;
      return sup_error(poly, [depth](double a) { return normalized_ntk(depth, a); }, grid_size);
    }
  }
  return 0.0;
}

std::vector<double> chebyshev_grid(std::size_t grid_size) {
  if (grid_size < 2) throw ParameterError("grid needs at least two points");
  std::vector<double> xs(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    xs[k] = std::cos(kPi * static_cast<double>(k) / static_cast<double>(grid_size - 1));
  }
  return xs;
}

std::vector<double> fit_nonnegative_polynomial(std::span<const double> xs,
                                               std::span<const double> ys, int degree) {
  if (degree < 0) throw ParameterError("polynomial degree must be non-negative");
  if (xs.size() != ys.size()) throw DimensionError("fit: sample sizes differ");
  if (xs.size() < static_cast<std::size_t>(degree) + 1) {
    throw ParameterError("fit: fewer samples than coefficients");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(xs.size());
  const Eigen::Index cols = degree + 1;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    double v = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      a(i, k) = v;
      v *= xs[i];
    }
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(ys.data(), rows);

  // Lawson-Hanson active set.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(cols, false);
  const double tol = 1e-12 * a.norm() * std::max(1.0, b.norm());
  const int max_outer = 3 * static_cast<int>(cols) + 10;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (passive[k]) idx.push_back(k);
    }
    z.setZero(cols);
    if (idx.empty()) return;
    Eigen::MatrixXd sub(rows, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(b);
    for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = sol[static_cast<Eigen::Index>(c)];
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!passive[k] && w[k] > best_w) {
        best_w = w[k];
        best = k;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    Eigen::VectorXd z;
    for (int inner = 0; inner <= cols; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index k = 0; k < cols; ++k) {
        if (passive[k] && z[k] <= 0.0) feasible = false;
      }
      if (feasible) break;
      double step = 1.0;
      for (Eigen::Index k = 0; k < cols; ++k) {
        if (passive[k] && z[k] <= 0.0) step = std::min(step, x[k] / (x[k] - z[k]));
      }
      x += step * (z - x);
      for (Eigen::Index k = 0; k < cols; ++k) {
        if (passive[k] && x[k] <= 1e-15) {
          passive[k] = false;
          x[k] = 0.0;
        }
      }
    }
    x = z;
  }

  std::vector<double> coeffs(cols);
  for (Eigen::Index k = 0; k < cols; ++k) coeffs[k] = std::max(0.0, x[k]);
  return coeffs;
}

KernelPolynomial fit_ntk_polynomial(int depth, int degree, std::size_t grid_size) {
  if (depth < 0) throw ParameterError("depth must be non-negative");
  const auto xs = chebyshev_grid(grid_size);
  std::vector<double> ys(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) ys[k] = normalized_ntk(depth, xs[k]);
  KernelPolynomial poly;
  poly.target = PolyTarget::fitted_ntk;
  poly.depth = depth;
  poly.coefficients = fit_nonnegative_polynomial(xs, ys, degree);
  double worst = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) worst = std::max(worst, std::abs(poly(xs[k]) - ys[k]));
  poly.fit_residual = worst;
  return poly;
}

}  // namespace ntksketch
