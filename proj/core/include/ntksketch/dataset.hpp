#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <span>
#include <vector>

#include "ntksketch/image_tensor.hpp"
#include "ntksketch/osnap.hpp"

namespace ntksketch {

enum class DatasetFormat { csv, libsvm, image_tensor };

/// A loaded dataset. Exactly one of dense_rows, sparse_rows, images is populated, according to
/// the format. Labels are empty when the source carries none.
struct Dataset {
  DatasetFormat format = DatasetFormat::csv;
  std::size_t dim = 0;  // feature dimension (vectors) or d1*d2*c (images)
  std::vector<std::vector<double>> dense_rows;
  std::vector<SparseVector> sparse_rows;
  std::vector<ImageTensor> images;
  std::vector<double> labels;

  std::size_t size() const noexcept;
  bool has_labels() const noexcept { return !labels.empty(); }
  /// Row i as a dense vector (vector formats only).
  std::vector<double> dense_row(std::size_t i) const;
};

/// Comma-separated numbers, one sample per line. A first line that does not parse as numbers is
/// treated as a header. When `labels_last` is set the last column holds the label.
/// Throws ParseError (with line number) or EmptyDatasetError.
Dataset parse_csv(std::istream& in, bool labels_last = true);

/// "label idx:value idx:value ..." with 1-based indices. `dim` = 0 infers the dimension from the
/// largest index seen.
Dataset parse_libsvm(std::istream& in, std::size_t dim = 0);

/// Binary image batch: magic "NTKIMG01", u64 d1, u64 d2, u64 c, u64 n, u8 dtype (0 = f32,
/// 1 = f64), u8 has_labels, then n*d1*d2*c little-endian values in (sample, i, j, l) order, then
/// n little-endian i64 labels when has_labels is 1.
Dataset read_image_tensors(std::istream& in);
void write_image_tensors(std::ostream& out, std::span<const ImageTensor> images,
                         std::span<const std::int64_t> labels = {}, bool f64 = true);

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
void save_image_tensors(const std::filesystem::path& path, std::span<const ImageTensor> images,
                        std::span<const std::int64_t> labels = {}, bool f64 = true);

/// Parses "csv", "libsvm" or "images". Throws ParameterError.
DatasetFormat parse_dataset_format(std::string_view name);
/// Guesses from the extension: .csv, .svm/.libsvm, anything else is an image batch.
DatasetFormat guess_dataset_format(const std::filesystem::path& path);

}  // namespace ntksketch
