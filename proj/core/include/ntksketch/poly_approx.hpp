#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ntksketch {

enum class PolyTarget { kappa1_taylor, kappa0_taylor, fitted_ntk };

/// Polynomial with nonnegative coefficients a_0..a_D in the monomial basis.
struct KernelPolynomial {
  std::vector<double> coefficients;
  PolyTarget target = PolyTarget::kappa1_taylor;
  int depth = 0;              // network depth, fitted_ntk only
  double fit_residual = 0.0;  // sup residual on the fitting grid, fitted_ntk only

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double operator()(double alpha) const;
};

/// Truncated series of kappa1: 1/pi + a/2 + sum_{i<=p} t_i/(pi (2i+1)(2i+2)) a^{2i+2},
/// where t_i = (2i)! / (4^i (i!)^2). Degree 2p+2.
KernelPolynomial taylor_coeffs_kappa1(int p);

/// Truncated series of kappa0: 1/2 + sum_{i<=p'} t_i/(pi (2i+1)) a^{2i+1}. Degree 2p'+1.
KernelPolynomial taylor_coeffs_kappa0(int p_prime);

/// The central binomial ratios t_0..t_n, t_i = t_{i-1} (2i-1)/(2i).
std::vector<double> central_binomial_ratios(int n);

struct DegreeChoice {
  std::int64_t p = 0;
  std::int64_t p_prime = 0;
  double kappa1_error_bound = 0.0;  // guaranteed sup error of the kappa1 series at degree p
  double kappa0_error_bound = 0.0;  // same for kappa0 at p'
};

/// p = ceil(2 L^2 / eps^{4/3}), p' = ceil(9 L^2 / eps^2), plus the sup-error bounds
/// (1/(9p))^{3/2} and 1/sqrt(26 p') that those degrees guarantee.
DegreeChoice choose_degrees(int depth, double eps);

/// Smallest truncation levels whose series meet a sup-error target eps.
std::int64_t kappa1_degree_for_error(double eps);
std::int64_t kappa0_degree_for_error(double eps);

/// Normalized depth-L NTK K^(L)(a) / (L+1), the target of fitted polynomials.
double normalized_ntk(int depth, double alpha);

/// Max |poly(a) - target(a)| over grid_size equally spaced points of [-1, 1].
double sup_error(const KernelPolynomial& poly, const std::function<double(double)>& target,
                 std::size_t grid_size);
/// Same, against the function the polynomial was built for.
double sup_error(const KernelPolynomial& poly, std::size_t grid_size);

/// Grid of grid_size Chebyshev-spaced points cos(pi k / (N-1)) covering [-1, 1].
std::vector<double> chebyshev_grid(std::size_t grid_size);

/// Least squares fit of sum_k a_k x^k to the samples subject to a_k >= 0 (active-set NNLS).
std::vector<double> fit_nonnegative_polynomial(std::span<const double> xs,
                                               std::span<const double> ys, int degree);

/// Nonnegative least squares fit of K^(L)/(L+1) on a Chebyshev grid. fit_residual holds the sup
/// residual on that grid.
KernelPolynomial fit_ntk_polynomial(int depth, int degree, std::size_t grid_size = 2001);

}  // namespace ntksketch
