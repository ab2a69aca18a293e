#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ntksketch {

/// Subsampled randomized Hadamard transform x -> sqrt(D/m) P H Sigma x.
///
/// The input is zero-padded to D = next power of two >= d, multiplied by a random sign diagonal
/// Sigma, rotated by the orthonormal Hadamard matrix H, and m coordinates are sampled uniformly
/// with replacement. E||Sx||^2 = ||x||^2 for every x.
///
/// Immutable after construction; apply() is safe to call concurrently.
class SrhtSketch {
 public:
  SrhtSketch(std::size_t input_dim, std::size_t output_dim, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t padded_dim() const noexcept { return signs_.size(); }
  std::size_t output_dim() const noexcept { return rows_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> sign_flips() const noexcept { return signs_; }
  std::span<const std::uint32_t> sampled_rows() const noexcept { return rows_; }

  std::vector<double> apply(std::span<const double> x) const;

  /// Allocation-free form: `scratch` is resized to padded_dim() as needed, `out` must have
  /// output_dim() entries.
  void apply(std::span<const double> x, std::span<double> out, std::vector<double>& scratch) const;

 private:
  std::size_t input_dim_;
  std::uint64_t seed_;
  double scale_;
  std::vector<double> signs_;
  std::vector<std::uint32_t> rows_;
};

/// Sketch of a two-fold tensor product x (x) y that never forms the d1*d2 vector:
/// entry k is (1/sqrt(m)) (H Sigma1 x)[i_k] (H Sigma2 y)[j_k] with H unnormalized and the pairs
/// (i_k, j_k) drawn uniformly and independently. Bilinear, and
/// E <T(x(x)y), T(z(x)w)> = <x,z><y,w>.
///
/// The spread/combine pieces are public so the PolySketch tree can cache the transformed
/// children of each node and recompute a single leaf-to-root path.
class TensorSrhtSketch {
 public:
  TensorSrhtSketch(std::size_t left_dim, std::size_t right_dim, std::size_t output_dim,
                   std::uint64_t seed);

  std::size_t left_dim() const noexcept { return left_dim_; }
  std::size_t right_dim() const noexcept { return right_dim_; }
  std::size_t left_padded_dim() const noexcept { return left_signs_.size(); }
  std::size_t right_padded_dim() const noexcept { return right_signs_.size(); }
  std::size_t output_dim() const noexcept { return left_rows_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> left_sign_flips() const noexcept { return left_signs_; }
  std::span<const double> right_sign_flips() const noexcept { return right_signs_; }
  std::span<const std::uint32_t> left_rows() const noexcept { return left_rows_; }
  std::span<const std::uint32_t> right_rows() const noexcept { return right_rows_; }

  std::vector<double> apply(std::span<const double> x, std::span<const double> y) const;

  /// out <- H Sigma1 x (length left_padded_dim()).
  void spread_left(std::span<const double> x, std::span<double> out) const;
  /// out <- H Sigma2 y (length right_padded_dim()).
  void spread_right(std::span<const double> y, std::span<double> out) const;
  /// spread_left(e_1) without the transform: H Sigma1 e_1 = Sigma1[0] * ones.
  void spread_left_basis(std::span<double> out) const;
  void spread_right_basis(std::span<double> out) const;
  /// out_k <- (1/sqrt(m)) left[i_k] * right[j_k].
  void combine(std::span<const double> left, std::span<const double> right,
               std::span<double> out) const;

 private:
  std::size_t left_dim_;
  std::size_t right_dim_;
  std::uint64_t seed_;
  double scale_;
  std::vector<double> left_signs_;
  std::vector<double> right_signs_;
  std::vector<std::uint32_t> left_rows_;
  std::vector<std::uint32_t> right_rows_;
};

}  // namespace ntksketch
