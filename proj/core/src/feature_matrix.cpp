#include "ntksketch/feature_matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "byte_io.hpp"
#include "ntksketch/error.hpp"

namespace ntksketch {

namespace {
constexpr char kFeatureMagic[8] = {'N', 'T', 'K', 'F', 'E', 'A', 'T', '1'};
constexpr std::uint64_t kMaxProvenance = 1u << 24;
}  // namespace

void write_features(std::ostream& out, const FeatureMatrix& f) {
  if (f.data.values.size() != f.data.rows * f.data.cols) {
    throw DimensionError("feature matrix payload does not match its shape");
  }
  for (double v : f.data.values) {
    if (!std::isfinite(v)) throw ParameterError("feature matrix contains a non-finite value");
  }
  out.write(kFeatureMagic, 8);
  detail::write_u64(out, f.data.rows);
  detail::write_u64(out, f.data.cols);
  detail::write_u8(out, static_cast<std::uint8_t>(f.storage));
  detail::write_u64(out, f.provenance.size());
  out.write(f.provenance.data(), static_cast<std::streamsize>(f.provenance.size()));
  for (double v : f.data.values) {
    if (f.storage == StorageType::f64) detail::write_f64(out, v);
    else detail::write_f32(out, static_cast<float>(v));
  }
}

FeatureMatrix read_features(std::istream& in) {
  char magic[8];
  detail::read_exact(in, magic, 8, "feature header");
  if (std::memcmp(magic, kFeatureMagic, 8) != 0) throw FormatError("not a feature file (bad magic)");
  FeatureMatrix f;
  const std::uint64_t rows = detail::read_u64(in, "feature header");
  const std::uint64_t cols = detail::read_u64(in, "feature header");
  const std::uint8_t dtype = detail::read_u8(in, "feature header");
  if (dtype > 1) throw FormatError("unknown feature dtype " + std::to_string(dtype));
  if (cols != 0 && rows > (1ull << 40) / cols) throw FormatError("feature matrix is implausibly large");
  const std::uint64_t prov_len = detail::read_u64(in, "provenance length");
  if (prov_len > kMaxProvenance) throw FormatError("provenance record is implausibly large");
  f.provenance.resize(prov_len);
  detail::read_exact(in, f.provenance.data(), prov_len, "provenance");
  f.storage = static_cast<StorageType>(dtype);
  f.data = DenseMatrix(rows, cols);
  for (double& v : f.data.values) {
    v = dtype == 1 ? detail::read_f64(in, "feature payload") : detail::read_f32(in, "feature payload");
  }
  return f;
}

void save_features(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  write_features(out, features);
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_features(in);
}

}  // namespace ntksketch
