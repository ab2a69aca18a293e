#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace ntksketch {

/// Row-major real matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
  std::span<double> row(std::size_t i) { return std::span<double>(values).subspan(i * cols, cols); }
};

enum class StorageType : std::uint8_t { f32 = 0, f64 = 1 };

/// Transformed dataset: one feature row per sample plus a JSON provenance record.
struct FeatureMatrix {
  DenseMatrix data;
  std::string provenance = "{}";
  StorageType storage = StorageType::f32;

  std::size_t rows() const noexcept { return data.rows; }
  std::size_t cols() const noexcept { return data.cols; }
};

/// Layout: "NTKFEAT1", u64 rows, u64 cols, u8 dtype, u64 provenance length, provenance bytes,
/// row-major payload, all little-endian. f32 storage rounds each value to float.
void write_features(std::ostream& out, const FeatureMatrix& features);
FeatureMatrix read_features(std::istream& in);

void save_features(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix load_features(const std::filesystem::path& path);

}  // namespace ntksketch
