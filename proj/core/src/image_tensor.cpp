#include "ntksketch/image_tensor.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ntksketch/error.hpp"

namespace ntksketch {

ImageTensor::ImageTensor(std::size_t rows, std::size_t cols, std::size_t channels)
    : ImageTensor(rows, cols, channels, std::vector<double>(rows * cols * channels, 0.0)) {}

ImageTensor::ImageTensor(std::size_t rows, std::size_t cols, std::size_t channels,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), channels_(channels), values_(std::move(values)) {
  if (rows == 0 || cols == 0 || channels == 0) {
    throw ParameterError("image dimensions must be positive");
  }
  if (values_.size() != rows * cols * channels) {
    throw DimensionError("image has " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(rows * cols * channels));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ParameterError("image contains a non-finite value");
  }
}

}  // namespace ntksketch
