#pragma once

#include <vector>

#include "ntksketch/image_tensor.hpp"

namespace ntksketch {

/// Per-layer patch norms N^(h), h = 0..depth. N^(0)_{ij} = q^2 ||x_ij||^2 and each later layer is
/// the q x q window sum of the previous one divided by q^2, with zero padding at the border.
/// Throws ParameterError if q is even or zero, or depth < 0.
std::vector<PixelGrid> patch_norms(const ImageTensor& x, int filter, int depth);

/// Every intermediate of the exact ReLU-CNTK dynamic program for one image pair.
struct CntkTrace {
  int depth = 0;
  int filter = 1;
  std::vector<PixelGrid> norms_y;             // h = 0..L
  std::vector<PixelGrid> norms_z;             // h = 0..L
  std::vector<PixelPairTensor> gamma;         // h = 0..L
  std::vector<PixelPairTensor> gamma_dot;     // h = 0..L; entry 0 is all zeros
  std::vector<PixelPairTensor> pi;            // h = 0..L

  /// Global-average-pooled kernel value: sum of the last pi tensor over (d1 d2)^2.
  double theta() const;
};

/// Runs the full dynamic program. Throws DimensionError if the shapes differ, ParameterError on
/// even q or depth < 1. Where a normalizer sqrt(N(y) N(z)) vanishes the cosine argument is 0.
CntkTrace cntk_trace(const ImageTensor& y, const ImageTensor& z, int filter, int depth);

/// Exact depth-L ReLU-CNTK with global average pooling.
double theta_cntk(const ImageTensor& y, const ImageTensor& z, int filter, int depth);

}  // namespace ntksketch
