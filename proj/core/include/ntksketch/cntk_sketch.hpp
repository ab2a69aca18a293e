#pragma once

#include <cstddef>
#include <vector>

#include "ntksketch/cntk_exact.hpp"
#include "ntksketch/gaussian_matrix.hpp"
#include "ntksketch/image_tensor.hpp"
#include "ntksketch/poly_approx.hpp"
#include "ntksketch/polysketch.hpp"
#include "ntksketch/sketch_config.hpp"
#include "ntksketch/srht.hpp"

namespace ntksketch {

/// Per-pixel intermediates of one CNTK feature computation. Each entry is indexed by layer and
/// holds d1*d2 vectors in row-major pixel order.
struct CntkLayerTrace {
  std::vector<std::vector<std::vector<double>>> phi;      // h = 0..L-1, dim r
  std::vector<std::vector<std::vector<double>>> phi_dot;  // h = 0..L, dim s; entries 0, 1 empty
  std::vector<std::vector<std::vector<double>>> psi;      // h = 1..L (entry 0 empty)
  std::vector<double> features;
};

/// Randomized feature map for the depth-L ReLU CNTK with global average pooling on d1 x d2 x c
/// images with q x q filters. The same sketch instances serve every pixel and the per-image cost
/// is linear in the pixel count. Immutable after construction.
///
/// Only Taylor-mode polynomials apply here. Without explicit (p, p') the degrees from the error
/// target are clamped to the configured cap.
class CntkSketch {
 public:
  CntkSketch(std::size_t rows, std::size_t cols, std::size_t channels, int filter,
             const SketchConfig& config);

  const ResolvedConfig& config() const noexcept { return config_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t channels() const noexcept { return channels_; }
  int filter() const noexcept { return filter_; }
  std::size_t output_dim() const noexcept { return config_.dims.s_star; }

  std::size_t layer_mix_input_dim() const noexcept { return layer_mix_.input_dim(); }
  std::size_t compression_cols() const noexcept { return gaussian_.cols(); }

  /// Patch norms N^(h) of x for h = 0..L.
  std::vector<PixelGrid> patch_norms(const ImageTensor& x) const;

  /// Throws DimensionError if x does not match the configured shape. An all-zero image maps to
  /// the zero vector.
  std::vector<double> transform(const ImageTensor& x) const;
  CntkLayerTrace transform_traced(const ImageTensor& x) const;

 private:
  CntkLayerTrace run(const ImageTensor& x, bool keep_trace) const;

  std::size_t rows_;
  std::size_t cols_;
  std::size_t channels_;
  int filter_;
  ResolvedConfig config_;
  KernelPolynomial kappa1_poly_;
  KernelPolynomial kappa0_poly_;
  std::vector<double> sqrt_c_;
  std::vector<double> sqrt_b_;

  SrhtSketch input_srht_;       // c -> r
  PolySketch covariance_poly_;  // degree 2p+2, q^2 r -> m
  SrhtSketch covariance_mix_;   // (2p+3)m -> r
  PolySketch derivative_poly_;  // degree 2p'+1, q^2 r -> n
  SrhtSketch derivative_mix_;   // (2p'+2)n -> s
  PolySketch product_poly_;     // degree 2, s -> m2
  SrhtSketch layer_mix_;        // q^2 (m2 + r) -> s
  GaussianMatrix gaussian_;     // s* x m2
};

}  // namespace ntksketch
