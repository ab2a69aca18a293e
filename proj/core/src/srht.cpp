#include "ntksketch/srht.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/fwht.hpp"
#include "ntksketch/random.hpp"

namespace ntksketch {

namespace {

void require_positive(std::size_t value, const char* what) {
  if (value == 0) throw ParameterError(std::string(what) + " must be positive");
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

std::vector<double> draw_signs(RandomStream& rng, std::size_t n) {
  std::vector<double> signs(n);
  for (auto& s : signs) s = rng.next_sign();
  return signs;
}

std::vector<std::uint32_t> draw_rows(RandomStream& rng, std::size_t count, std::size_t range) {
  std::vector<std::uint32_t> rows(count);
  for (auto& r : rows) r = static_cast<std::uint32_t>(rng.next_below(range));
  return rows;
}

// out <- H Sigma x_padded.
void sign_and_transform(std::span<const double> x, std::span<const double> signs,
                        std::span<double> out) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) out[i] = signs[i] * x[i];
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(d), out.end(), 0.0);
  fwht_inplace(out);
}

}  // namespace

SrhtSketch::SrhtSketch(std::size_t input_dim, std::size_t output_dim, std::uint64_t seed)
    : input_dim_(input_dim), seed_(seed) {
  require_positive(input_dim, "SRHT input dimension");
  require_positive(output_dim, "SRHT output dimension");
  const std::size_t padded = next_power_of_two(input_dim);
  RandomStream rng(seed, 0);
  signs_ = draw_signs(rng, padded);
  rows_ = draw_rows(rng, output_dim, padded);
  // sqrt(D/m) with the orthonormal H = H_unnormalized / sqrt(D).
  scale_ = 1.0 / std::sqrt(static_cast<double>(output_dim));
}

std::vector<double> SrhtSketch::apply(std::span<const double> x) const {
  std::vector<double> out(output_dim());
  std::vector<double> scratch;
  apply(x, out, scratch);
  return out;
}

void SrhtSketch::apply(std::span<const double> x, std::span<double> out,
                       std::vector<double>& scratch) const {
  require_dim(x.size(), input_dim_, "SrhtSketch::apply");
  require_dim(out.size(), output_dim(), "SrhtSketch::apply output");
  scratch.resize(padded_dim());
  sign_and_transform(x, signs_, scratch);
  for (std::size_t k = 0; k < rows_.size(); ++k) out[k] = scale_ * scratch[rows_[k]];
}

TensorSrhtSketch::TensorSrhtSketch(std::size_t left_dim, std::size_t right_dim,
                                   std::size_t output_dim, std::uint64_t seed)
    : left_dim_(left_dim), right_dim_(right_dim), seed_(seed) {
  require_positive(left_dim, "TensorSRHT left dimension");
  require_positive(right_dim, "TensorSRHT right dimension");
  require_positive(output_dim, "TensorSRHT output dimension");
  RandomStream rng(seed, 0);
  left_signs_ = draw_signs(rng, next_power_of_two(left_dim));
  right_signs_ = draw_signs(rng, next_power_of_two(right_dim));
  left_rows_ = draw_rows(rng, output_dim, left_signs_.size());
  right_rows_ = draw_rows(rng, output_dim, right_signs_.size());
  scale_ = 1.0 / std::sqrt(static_cast<double>(output_dim));
}

std::vector<double> TensorSrhtSketch::apply(std::span<const double> x,
                                            std::span<const double> y) const {
  std::vector<double> left(left_padded_dim());
  std::vector<double> right(right_padded_dim());
  spread_left(x, left);
  spread_right(y, right);
  std::vector<double> out(output_dim());
  combine(left, right, out);
  return out;
}

void TensorSrhtSketch::spread_left(std::span<const double> x, std::span<double> out) const {
  require_dim(x.size(), left_dim_, "TensorSrhtSketch left factor");
  require_dim(out.size(), left_padded_dim(), "TensorSrhtSketch left buffer");
  sign_and_transform(x, left_signs_, out);
}

void TensorSrhtSketch::spread_right(std::span<const double> y, std::span<double> out) const {
  require_dim(y.size(), right_dim_, "TensorSrhtSketch right factor");
  require_dim(out.size(), right_padded_dim(), "TensorSrhtSketch right buffer");
  sign_and_transform(y, right_signs_, out);
}

void TensorSrhtSketch::spread_left_basis(std::span<double> out) const {
  require_dim(out.size(), left_padded_dim(), "TensorSrhtSketch left buffer");
  std::fill(out.begin(), out.end(), left_signs_[0]);
}

void TensorSrhtSketch::spread_right_basis(std::span<double> out) const {
  require_dim(out.size(), right_padded_dim(), "TensorSrhtSketch right buffer");
  std::fill(out.begin(), out.end(), right_signs_[0]);
}

void TensorSrhtSketch::combine(std::span<const double> left, std::span<const double> right,
                               std::span<double> out) const {
  require_dim(out.size(), output_dim(), "TensorSrhtSketch output");
  for (std::size_t k = 0; k < left_rows_.size(); ++k) {
    out[k] = scale_ * left[left_rows_[k]] * right[right_rows_[k]];
  }
}

}  // namespace ntksketch
