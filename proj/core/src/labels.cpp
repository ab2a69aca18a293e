#include "ntksketch/labels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntksketch/error.hpp"

namespace ntksketch {

DenseMatrix encode_labels(std::span<const std::int64_t> labels, std::size_t classes) {
  if (classes < 2) throw ParameterError("need at least two classes");
  DenseMatrix y(labels.size(), classes);
  const double off = -1.0 / static_cast<double>(classes);
  std::fill(y.values.begin(), y.values.end(), off);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::int64_t l = labels[i];
    if (l < 0 || static_cast<std::size_t>(l) >= classes) {
      throw ParameterError("label " + std::to_string(l) + " at row " + std::to_string(i) +
                           " outside [0, " + std::to_string(classes) + ")");
    }
    y(i, static_cast<std::size_t>(l)) = 1.0 + off;
  }
  return y;
}

std::vector<std::int64_t> to_class_ids(std::span<const double> labels) {
  std::vector<std::int64_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = labels[i];
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
      throw ParameterError("label " + std::to_string(v) + " at row " + std::to_string(i) +
                           " is not a class id");
    }
    out[i] = static_cast<std::int64_t>(v);
  }
  return out;
}

}  // namespace ntksketch
