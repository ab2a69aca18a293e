#include "ntksketch/cntk_exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ntksketch/error.hpp"
#include "ntksketch/relu_ntk.hpp"

namespace ntksketch {

namespace {

void check_filter(int filter) {
  if (filter < 1 || filter % 2 == 0) {
    throw ParameterError("filter size must be a positive odd integer, got " +
                         std::to_string(filter));
  }
}

// Sum of grid over the q x q window centred at every pixel, zero outside the image.
PixelGrid window_sum(const PixelGrid& g, int filter) {
  const long half = filter / 2;
  const long rows = static_cast<long>(g.rows), cols = static_cast<long>(g.cols);
  PixelGrid out(g.rows, g.cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      double s = 0.0;
      for (long a = std::max(-half, -i); a <= std::min(half, rows - 1 - i); ++a) {
        for (long b = std::max(-half, -j); b <= std::min(half, cols - 1 - j); ++b) {
          s += g(i + a, j + b);
        }
      }
      out(i, j) = s;
    }
  }
  return out;
}

// out(i,j,i',j') = sum over (a,b) of t(i+a, j+b, i'+a, j'+b); terms with any index outside the
// image are dropped.
PixelPairTensor shifted_window_sum(const PixelPairTensor& t, int filter) {
  const long half = filter / 2;
  const long rows = static_cast<long>(t.rows), cols = static_cast<long>(t.cols);
  PixelPairTensor out(t.rows, t.cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      for (long i2 = 0; i2 < rows; ++i2) {
        const long a_lo = std::max({-half, -i, -i2});
        const long a_hi = std::min({half, rows - 1 - i, rows - 1 - i2});
        for (long j2 = 0; j2 < cols; ++j2) {
          const long b_lo = std::max({-half, -j, -j2});
          const long b_hi = std::min({half, cols - 1 - j, cols - 1 - j2});
          double s = 0.0;
          for (long a = a_lo; a <= a_hi; ++a) {
            for (long b = b_lo; b <= b_hi; ++b) s += t(i + a, j + b, i2 + a, j2 + b);
          }
          out(i, j, i2, j2) = s;
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<PixelGrid> patch_norms(const ImageTensor& x, int filter, int depth) {
  check_filter(filter);
  if (depth < 0) throw ParameterError("depth must be non-negative");
  if (x.size() == 0) throw ParameterError("image dimensions must be positive");
  const double q2 = static_cast<double>(filter) * filter;
  std::vector<PixelGrid> norms;
  norms.reserve(depth + 1);
  // Squared pixel norms; N^(0) is q^2 times this, and N^(1) is their window sum.
  PixelGrid energy(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = 0.0;
      for (double v : x.pixel(i, j)) s += v * v;
      energy(i, j) = s;
    }
  }
  PixelGrid base = energy;
  for (double& v : base.values) v *= q2;
  norms.push_back(std::move(base));
  // Each later layer sums N/q^2 (not N, divided afterwards) so that it matches the window sum of
  // the covariance diagonal term for term.
  PixelGrid scaled = std::move(energy);
  for (int h = 1; h <= depth; ++h) {
    norms.push_back(window_sum(scaled, filter));
    scaled = norms.back();
    for (double& v : scaled.values) v /= q2;
  }
  return norms;
}

double CntkTrace::theta() const {
  const PixelPairTensor& last = pi.back();
  const double pixels = static_cast<double>(last.rows * last.cols);
  const double total = std::accumulate(last.values.begin(), last.values.end(), 0.0);
  return total / (pixels * pixels);
}

CntkTrace cntk_trace(const ImageTensor& y, const ImageTensor& z, int filter, int depth) {
  check_filter(filter);
  if (depth < 1) throw ParameterError("CNTK depth must be at least 1");
  if (!y.same_shape(z)) throw DimensionError("cntk_trace: image shapes differ");

  const std::size_t rows = y.rows(), cols = y.cols();
  const std::size_t pixels = rows * cols;
  const double q2 = static_cast<double>(filter) * filter;

  CntkTrace tr;
  tr.depth = depth;
  tr.filter = filter;
  tr.norms_y = patch_norms(y, filter, depth);
  tr.norms_z = patch_norms(z, filter, depth);

  PixelPairTensor gamma0(rows, cols);
  for (std::size_t p = 0; p < pixels; ++p) {
    const auto yp = y.pixel(p / cols, p % cols);
    for (std::size_t r = 0; r < pixels; ++r) {
      const auto zr = z.pixel(r / cols, r % cols);
      double s = 0.0;
      for (std::size_t l = 0; l < yp.size(); ++l) s += yp[l] * zr[l];
      gamma0.values[p * pixels + r] = s;
    }
  }
  tr.gamma.push_back(std::move(gamma0));
  tr.gamma_dot.emplace_back(rows, cols);
  tr.pi.emplace_back(rows, cols);

  for (int h = 1; h <= depth; ++h) {
    const PixelGrid& ny = tr.norms_y[h];
    const PixelGrid& nz = tr.norms_z[h];
    PixelPairTensor summed = shifted_window_sum(tr.gamma[h - 1], filter);
    PixelPairTensor gamma(rows, cols), gamma_dot(rows, cols);
    for (std::size_t p = 0; p < pixels; ++p) {
      for (std::size_t r = 0; r < pixels; ++r) {
        const std::size_t k = p * pixels + r;
        const double norm = std::sqrt(ny.values[p] * nz.values[r]);
        const double arg = norm > 0.0 ? std::clamp(summed.values[k] / norm, -1.0 - kCosineTolerance,
                                                   1.0 + kCosineTolerance)
                                      : 0.0;
        gamma.values[k] = norm / q2 * kappa1(arg);
        gamma_dot.values[k] = kappa0(arg) / q2;
      }
    }

    PixelPairTensor pi(rows, cols);
    const PixelPairTensor& prev = tr.pi[h - 1];
    if (h < depth) {
      PixelPairTensor inner(rows, cols);
      for (std::size_t k = 0; k < inner.values.size(); ++k) {
        inner.values[k] = prev.values[k] * gamma_dot.values[k] + gamma.values[k];
      }
      pi = shifted_window_sum(inner, filter);
    } else {
      for (std::size_t k = 0; k < pi.values.size(); ++k) {
        pi.values[k] = prev.values[k] * gamma_dot.values[k];
      }
    }
    tr.gamma.push_back(std::move(gamma));
    tr.gamma_dot.push_back(std::move(gamma_dot));
    tr.pi.push_back(std::move(pi));
  }
  return tr;
}

double theta_cntk(const ImageTensor& y, const ImageTensor& z, int filter, int depth) {
  return cntk_trace(y, z, filter, depth).theta();
}

}  // namespace ntksketch
