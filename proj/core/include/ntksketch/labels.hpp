#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ntksketch/feature_matrix.hpp"

namespace ntksketch {

/// Zero-mean one-hot targets: the row for class j is e_j - (1/t) 1, so every row sums to zero.
/// Throws ParameterError if t < 2 or a label lies outside [0, t).
DenseMatrix encode_labels(std::span<const std::int64_t> labels, std::size_t classes);

/// Converts real-valued labels to class ids, rejecting non-integers and negatives.
std::vector<std::int64_t> to_class_ids(std::span<const double> labels);

}  // namespace ntksketch
