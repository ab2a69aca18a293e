#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ntksketch/cntk_sketch.hpp"
#include "ntksketch/dataset.hpp"
#include "ntksketch/feature_matrix.hpp"
#include "ntksketch/ntk_sketch.hpp"

namespace ntksketch {

/// Row i of the result is the transform of sample i. Samples are split across `threads` workers;
/// the output does not depend on the thread count. A failing sample raises BatchError carrying
/// the smallest failing index and the original exception.
FeatureMatrix batch_transform(const NtkSketch& sketch, std::span<const std::vector<double>> rows,
                              std::size_t threads = 1);
FeatureMatrix batch_transform(const NtkSketch& sketch, std::span<const SparseVector> rows,
                              std::size_t threads = 1);
FeatureMatrix batch_transform(const CntkSketch& sketch, std::span<const ImageTensor> images,
                              std::size_t threads = 1);

/// Dispatches on the dataset format (vector formats need an NtkSketch, images a CntkSketch).
FeatureMatrix batch_transform(const NtkSketch& sketch, const Dataset& data, std::size_t threads = 1);
FeatureMatrix batch_transform(const CntkSketch& sketch, const Dataset& data, std::size_t threads = 1);

}  // namespace ntksketch
