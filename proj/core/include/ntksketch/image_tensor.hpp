#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ntksketch {

/// Real d1 x d2 x c image stored row-major with channels innermost: value (i, j, l) lives at
/// (i * d2 + j) * c + l.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(std::size_t rows, std::size_t cols, std::size_t channels);
  ImageTensor(std::size_t rows, std::size_t cols, std::size_t channels, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return rows_ * cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(std::size_t i, std::size_t j, std::size_t l) const {
    return values_[(i * cols_ + j) * channels_ + l];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t l) {
    return values_[(i * cols_ + j) * channels_ + l];
  }
  /// The c channel values of pixel (i, j).
  std::span<const double> pixel(std::size_t i, std::size_t j) const {
    return std::span<const double>(values_).subspan((i * cols_ + j) * channels_, channels_);
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool same_shape(const ImageTensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ && channels_ == other.channels_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

/// d1 x d2 grid of per-pixel scalars (patch norms), row-major.
struct PixelGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  PixelGrid() = default;
  PixelGrid(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// d1 x d2 x d1 x d2 tensor indexed by a pair of pixels, row-major over (i, j, i', j').
struct PixelPairTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  PixelPairTensor() = default;
  PixelPairTensor(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c * r * c, 0.0) {}
  std::size_t index(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) const {
    return (i * cols + j) * (rows * cols) + (i2 * cols + j2);
  }
  double operator()(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) const {
    return values[index(i, j, i2, j2)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) {
    return values[index(i, j, i2, j2)];
  }
};

}  // namespace ntksketch
