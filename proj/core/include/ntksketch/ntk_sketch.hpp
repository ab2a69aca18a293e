#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ntksketch/gaussian_matrix.hpp"
#include "ntksketch/osnap.hpp"
#include "ntksketch/poly_approx.hpp"
#include "ntksketch/polysketch.hpp"
#include "ntksketch/sketch_config.hpp"
#include "ntksketch/srht.hpp"

namespace ntksketch {

/// Intermediate vectors of one NTK feature computation (Taylor mode).
struct NtkLayerTrace {
  std::vector<std::vector<double>> phi;        // h = 0..L, dim r
  std::vector<std::vector<double>> phi_dot;    // h = 0..L, dim s; entry 0 empty
  std::vector<std::vector<double>> psi;        // h = 0..L, dim s
  std::vector<double> features;                // dim s*
};

/// Randomized feature map whose inner products approximate the depth-L ReLU NTK.
///
/// Taylor mode propagates sketched covariance vectors layer by layer, replacing each
/// arc-cosine kernel by its truncated Taylor series. Fitted mode sketches a single nonnegative
/// polynomial fitted to the normalized NTK. The state is immutable after construction; transform
/// calls are const and may run concurrently.
class NtkSketch {
 public:
  NtkSketch(std::size_t input_dim, const SketchConfig& config);

  const ResolvedConfig& config() const noexcept { return config_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return config_.dims.s_star; }
  PolyMode mode() const noexcept { return config_.mode; }

  /// Throws ZeroInputError if x = 0, DimensionError on a size mismatch.
  std::vector<double> transform(std::span<const double> x) const;
  std::vector<double> transform(const SparseVector& x) const;

  /// Taylor mode only; also returns every per-layer vector.
  NtkLayerTrace transform_traced(std::span<const double> x) const;

  const KernelPolynomial& covariance_polynomial() const noexcept { return kappa1_poly_; }
  const KernelPolynomial& derivative_polynomial() const noexcept { return kappa0_poly_; }
  const KernelPolynomial& fitted_polynomial() const noexcept { return fitted_poly_; }
  const GaussianMatrix& compression() const noexcept { return *gaussian_; }

  // Component sizes, exposed for dimension-chain checks.
  std::size_t covariance_mix_input_dim() const;  // T
  std::size_t derivative_mix_input_dim() const;  // W
  std::size_t layer_mix_input_dim() const;       // R

 private:
  struct Input;
  NtkLayerTrace run_taylor(const Input& in, bool keep_trace) const;
  std::vector<double> run_fitted(const Input& in) const;
  std::vector<double> dispatch(const Input& in) const;

  std::size_t input_dim_;
  ResolvedConfig config_;
  KernelPolynomial kappa1_poly_;
  KernelPolynomial kappa0_poly_;
  KernelPolynomial fitted_poly_;
  std::vector<double> sqrt_c_;
  std::vector<double> sqrt_b_;
  std::vector<double> sqrt_a_;

  // Taylor mode
  std::optional<OsnapSketch> linear_leaf_;      // d -> n
  std::optional<SrhtSketch> input_srht_;        // n -> r
  std::optional<PolySketch> covariance_poly_;   // degree 2p+2, r -> m
  std::optional<SrhtSketch> covariance_mix_;    // (2p+3)m -> r
  std::optional<PolySketch> derivative_poly_;   // degree 2p'+1, r -> n1
  std::optional<SrhtSketch> derivative_mix_;    // (2p'+2)n1 -> s
  std::optional<PolySketch> product_poly_;      // degree 2, s -> m2
  std::optional<SrhtSketch> layer_mix_;         // m2 + r -> s
  std::optional<SrhtSketch> base_srht_;         // r -> s
  // Fitted mode
  std::optional<PolySketch> fitted_poly_sketch_;  // degree D, d -> m
  std::optional<SrhtSketch> fitted_mix_;          // (D+1)m -> s

  std::optional<GaussianMatrix> gaussian_;  // s* x s
};

}  // namespace ntksketch
