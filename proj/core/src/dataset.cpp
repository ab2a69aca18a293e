#include "ntksketch/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "byte_io.hpp"
#include "ntksketch/error.hpp"

namespace ntksketch {

namespace {

constexpr char kImageMagic[8] = {'N', 'T', 'K', 'I', 'M', 'G', '0', '1'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool split_numbers(std::string_view line, std::vector<double>& out) {
  out.clear();
  while (true) {
    const auto comma = line.find(',');
    double v = 0.0;
    if (!parse_number(line.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    line.remove_prefix(comma + 1);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::size_t Dataset::size() const noexcept {
  switch (format) {
    case DatasetFormat::csv: return dense_rows.size();
    case DatasetFormat::libsvm: return sparse_rows.size();
    case DatasetFormat::image_tensor: return images.size();
  }
  return 0;
}

std::vector<double> Dataset::dense_row(std::size_t i) const {
  if (format == DatasetFormat::csv) return dense_rows.at(i);
  if (format == DatasetFormat::libsvm) {
    const SparseVector& sv = sparse_rows.at(i);
    std::vector<double> out(dim, 0.0);
    for (std::size_t k = 0; k < sv.nnz(); ++k) out[sv.indices[k]] += sv.values[k];
    return out;
  }
  const auto v = images.at(i).values();
  return {v.begin(), v.end()};
}

Dataset parse_csv(std::istream& in, bool labels_last) {
  Dataset ds;
  ds.format = DatasetFormat::csv;
  std::string line;
  std::vector<double> fields;
  std::size_t line_no = 0;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const bool ok = split_numbers(view, fields);
    if (first) {
      first = false;
      if (!ok) continue;  // header
    }
    if (!ok) throw ParseError("expected comma-separated finite numbers", line_no);
    if (width == 0) {
      width = fields.size();
      if (labels_last && width < 2) throw ParseError("need at least one feature and a label", line_no);
    } else if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, found " +
                       std::to_string(fields.size()), line_no);
    }
    if (labels_last) {
      ds.labels.push_back(fields.back());
      fields.pop_back();
    }
    ds.dense_rows.push_back(fields);
  }
  if (ds.dense_rows.empty()) throw EmptyDatasetError("CSV input contains no samples");
  ds.dim = ds.dense_rows.front().size();
  return ds;
}

Dataset parse_libsvm(std::istream& in, std::size_t dim) {
  Dataset ds;
  ds.format = DatasetFormat::libsvm;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    std::istringstream tokens{std::string(view)};
    std::string token;
    tokens >> token;
    double label = 0.0;
    if (!parse_number(token, label)) throw ParseError("bad label '" + token + "'", line_no);
    SparseVector row;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw ParseError("expected index:value, got '" + token + "'", line_no);
      std::size_t index = 0;
      const std::string_view idx_text = std::string_view(token).substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
      if (ec != std::errc{} || ptr != idx_text.data() + idx_text.size() || index == 0) {
        throw ParseError("bad feature index in '" + token + "'", line_no);
      }
      if (index > std::numeric_limits<std::uint32_t>::max()) throw ParseError("feature index too large", line_no);
      double value = 0.0;
      if (!parse_number(std::string_view(token).substr(colon + 1), value)) {
        throw ParseError("bad feature value in '" + token + "'", line_no);
      }
      if (dim != 0 && index > dim) {
        throw ParseError("feature index " + std::to_string(index) + " exceeds dimension " +
                         std::to_string(dim), line_no);
      }
      max_index = std::max(max_index, index);
      row.indices.push_back(static_cast<std::uint32_t>(index - 1));
      row.values.push_back(value);
    }
    ds.labels.push_back(label);
    ds.sparse_rows.push_back(std::move(row));
  }
  if (ds.sparse_rows.empty()) throw EmptyDatasetError("LibSVM input contains no samples");
  ds.dim = dim != 0 ? dim : std::max<std::size_t>(max_index, 1);
  for (auto& row : ds.sparse_rows) row.dim = ds.dim;
  return ds;
}

Dataset read_image_tensors(std::istream& in) {
  char magic[8];
  detail::read_exact(in, magic, 8, "image header");
  if (std::memcmp(magic, kImageMagic, 8) != 0) throw FormatError("not an image tensor file (bad magic)");
  const std::uint64_t d1 = detail::read_u64(in, "image header");
  const std::uint64_t d2 = detail::read_u64(in, "image header");
  const std::uint64_t c = detail::read_u64(in, "image header");
  const std::uint64_t n = detail::read_u64(in, "image header");
  const std::uint8_t dtype = detail::read_u8(in, "image header");
  const std::uint8_t has_labels = detail::read_u8(in, "image header");
  if (dtype > 1) throw FormatError("unknown image dtype " + std::to_string(dtype));
  if (has_labels > 1) throw FormatError("bad label flag");
  if (d1 == 0 || d2 == 0 || c == 0) throw FormatError("image dimensions must be positive");
  if (d1 > (1u << 20) || d2 > (1u << 20) || c > (1u << 20) || d1 * d2 * c > (1ull << 32)) {
    throw FormatError("image dimensions are implausibly large");
  }
  if (n == 0) throw EmptyDatasetError("image file contains no samples");

  Dataset ds;
  ds.format = DatasetFormat::image_tensor;
  ds.dim = d1 * d2 * c;
  ds.images.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    std::vector<double> values(ds.dim);
    for (double& v : values) {
      v = dtype == 1 ? detail::read_f64(in, "image payload") : detail::read_f32(in, "image payload");
    }
    try {
      ds.images.emplace_back(d1, d2, c, std::move(values));
    } catch (const ParameterError& e) {
      throw FormatError("image " + std::to_string(k) + ": " + e.what());
    }
  }
  if (has_labels) {
    ds.labels.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      ds.labels.push_back(static_cast<double>(static_cast<std::int64_t>(detail::read_u64(in, "labels"))));
    }
  }
  return ds;
}

void write_image_tensors(std::ostream& out, std::span<const ImageTensor> images,
                         std::span<const std::int64_t> labels, bool f64) {
  if (images.empty()) throw EmptyDatasetError("no images to write");
  if (!labels.empty() && labels.size() != images.size()) {
    throw DimensionError("label count does not match image count");
  }
  const ImageTensor& first = images.front();
  for (const auto& img : images) {
    if (!img.same_shape(first)) throw DimensionError("images in one file must share a shape");
  }
  out.write(kImageMagic, 8);
  detail::write_u64(out, first.rows());
  detail::write_u64(out, first.cols());
  detail::write_u64(out, first.channels());
  detail::write_u64(out, images.size());
  detail::write_u8(out, f64 ? 1 : 0);
  detail::write_u8(out, labels.empty() ? 0 : 1);
  for (const auto& img : images) {
    for (double v : img.values()) {
      if (f64) detail::write_f64(out, v);
      else detail::write_f32(out, static_cast<float>(v));
    }
  }
  for (std::int64_t l : labels) detail::write_u64(out, static_cast<std::uint64_t>(l));
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in = open_input(path);
  switch (format) {
    case DatasetFormat::csv: return parse_csv(in);
    case DatasetFormat::libsvm: return parse_libsvm(in);
    case DatasetFormat::image_tensor: return read_image_tensors(in);
  }
  throw ParameterError("unknown dataset format");
}

void save_image_tensors(const std::filesystem::path& path, std::span<const ImageTensor> images,
                        std::span<const std::int64_t> labels, bool f64) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  write_image_tensors(out, images, labels, f64);
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "csv") return DatasetFormat::csv;
  if (name == "libsvm" || name == "svm") return DatasetFormat::libsvm;
  if (name == "images" || name == "image" || name == "raw-image-tensor") return DatasetFormat::image_tensor;
  throw ParameterError("unknown dataset format '" + std::string(name) + "'");
}

DatasetFormat guess_dataset_format(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return DatasetFormat::csv;
  if (ext == ".svm" || ext == ".libsvm") return DatasetFormat::libsvm;
  return DatasetFormat::image_tensor;
}

}  // namespace ntksketch
