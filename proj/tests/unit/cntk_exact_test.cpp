#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ntksketch/cntk_exact.hpp"
#include "ntksketch/error.hpp"
#include "ntksketch/relu_ntk.hpp"
#include "oracles.hpp"

namespace ntksketch {
namespace {

using testing::random_image;

// Straightforward reimplementation over explicit 4-index arrays with bounds-checked reads.
class BruteForceCntk {
 public:
  BruteForceCntk(const ImageTensor& y, const ImageTensor& z, int q, int depth)
      : rows_(static_cast<long>(y.rows())), cols_(static_cast<long>(y.cols())), q_(q) {
    const long n = rows_ * cols_;
    const double q2 = static_cast<double>(q) * q;
    std::vector<double> ny(n), nz(n);
    for (long p = 0; p < n; ++p) {
      for (std::size_t l = 0; l < y.channels(); ++l) {
        ny[p] += q2 * y.values()[p * y.channels() + l] * y.values()[p * y.channels() + l];
        nz[p] += q2 * z.values()[p * z.channels() + l] * z.values()[p * z.channels() + l];
      }
    }
    std::vector<double> gamma(n * n, 0.0), pi(n * n, 0.0);
    for (long p = 0; p < n; ++p) {
      for (long r = 0; r < n; ++r) {
        for (std::size_t l = 0; l < y.channels(); ++l) {
          gamma[p * n + r] += y.values()[p * y.channels() + l] * z.values()[r * z.channels() + l];
        }
      }
    }
    for (int h = 1; h <= depth; ++h) {
      ny = average(ny);
      nz = average(nz);
      std::vector<double> g(n * n), gd(n * n), next(n * n);
      for (long i = 0; i < rows_; ++i)
        for (long j = 0; j < cols_; ++j)
          for (long i2 = 0; i2 < rows_; ++i2)
            for (long j2 = 0; j2 < cols_; ++j2) {
              const long k = (i * cols_ + j) * n + i2 * cols_ + j2;
              const double norm = std::sqrt(ny[i * cols_ + j] * nz[i2 * cols_ + j2]);
              const double s = shifted(gamma, i, j, i2, j2);
              const double a = norm > 0.0 ? std::clamp(s / norm, -1.0, 1.0) : 0.0;
              g[k] = norm / q2 * kappa1(a);
              gd[k] = kappa0(a) / q2;
            }
      std::vector<double> inner(n * n);
      for (long k = 0; k < n * n; ++k) inner[k] = pi[k] * gd[k] + (h < depth ? g[k] : 0.0);
      if (h < depth) {
        for (long i = 0; i < rows_; ++i)
          for (long j = 0; j < cols_; ++j)
            for (long i2 = 0; i2 < rows_; ++i2)
              for (long j2 = 0; j2 < cols_; ++j2) {
                next[(i * cols_ + j) * n + i2 * cols_ + j2] = shifted(inner, i, j, i2, j2);
              }
      } else {
        next = inner;
      }
      gamma = g;
      pi = next;
    }
    double total = 0.0;
    for (double v : pi) total += v;
    theta_ = total / (static_cast<double>(n) * n);
  }

  double theta() const { return theta_; }

 private:
  bool inside(long i, long j) const { return i >= 0 && i < rows_ && j >= 0 && j < cols_; }

  std::vector<double> average(const std::vector<double>& grid) const {
    std::vector<double> out(grid.size(), 0.0);
    const long half = q_ / 2;
    for (long i = 0; i < rows_; ++i)
      for (long j = 0; j < cols_; ++j)
        for (long a = -half; a <= half; ++a)
          for (long b = -half; b <= half; ++b)
            if (inside(i + a, j + b)) out[i * cols_ + j] += grid[(i + a) * cols_ + j + b];
    for (double& v : out) v /= static_cast<double>(q_) * q_;
    return out;
  }

  double shifted(const std::vector<double>& t, long i, long j, long i2, long j2) const {
    const long half = q_ / 2, n = rows_ * cols_;
    double s = 0.0;
    for (long a = -half; a <= half; ++a)
      for (long b = -half; b <= half; ++b)
        if (inside(i + a, j + b) && inside(i2 + a, j2 + b)) {
          s += t[((i + a) * cols_ + j + b) * n + (i2 + a) * cols_ + j2 + b];
        }
    return s;
  }

  long rows_, cols_;
  int q_;
  double theta_ = 0.0;
};

TEST(PatchNorms, SinglePixel) {
  const ImageTensor x(1, 1, 1, {-1.5});
  const auto norms = patch_norms(x, 1, 4);
  ASSERT_EQ(norms.size(), 5u);
  for (const auto& n : norms) EXPECT_DOUBLE_EQ(n(0, 0), 2.25);
}

TEST(PatchNorms, AllOnesCenterAndBorder) {
  const ImageTensor x(5, 5, 1, std::vector<double>(25, 1.0));
  const auto norms = patch_norms(x, 3, 2);
  EXPECT_DOUBLE_EQ(norms[0](2, 2), 9.0);
  EXPECT_DOUBLE_EQ(norms[1](2, 2), 9.0);
  EXPECT_DOUBLE_EQ(norms[1](0, 0), 4.0);  // 4 of 9 window cells inside the image
  EXPECT_DOUBLE_EQ(norms[1](0, 2), 6.0);
  EXPECT_DOUBLE_EQ(norms[2](0, 0), (4.0 + 6.0 + 6.0 + 9.0) / 9.0);
}

TEST(PatchNorms, NonnegativeAndValidated) {
  std::mt19937_64 rng(1);
  const auto x = random_image(6, 5, 3, rng);
  for (const auto& n : patch_norms(x, 3, 4)) {
    for (double v : n.values) EXPECT_GE(v, 0.0);
  }
  EXPECT_THROW(patch_norms(x, 2, 1), ParameterError);
  EXPECT_THROW(patch_norms(x, 3, -1), ParameterError);
}

TEST(CntkExact, HandComputedSinglePixel) {
  const ImageTensor y(1, 1, 1, {2.0}), z(1, 1, 1, {3.0});
  EXPECT_NEAR(theta_cntk(y, z, 1, 2), 6.0, 1e-12);
  EXPECT_EQ(theta_cntk(y, z, 1, 1), 0.0);
}

TEST(CntkExact, DepthOneIsZero) {
  std::mt19937_64 rng(2);
  const auto y = random_image(4, 4, 2, rng), z = random_image(4, 4, 2, rng);
  EXPECT_EQ(theta_cntk(y, z, 3, 1), 0.0);
}

TEST(CntkExact, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int q : {1, 3, 5}) {
    for (int depth : {2, 3, 4}) {
      const auto y = random_image(4, 5, 2, rng), z = random_image(4, 5, 2, rng);
      const double fast = theta_cntk(y, z, q, depth);
      const double slow = BruteForceCntk(y, z, q, depth).theta();
      EXPECT_NEAR(fast, slow, 1e-10 * (1.0 + std::abs(slow))) << "q=" << q << " L=" << depth;
    }
  }
}

TEST(CntkExact, DiagonalIdentities) {
  std::mt19937_64 rng(4);
  for (int q : {1, 3}) {
    const int depth = 4;
    const auto y = random_image(5, 4, 3, rng);
    const auto tr = cntk_trace(y, y, q, depth);
    const double q2 = q * q;
    for (int h = 1; h <= depth; ++h) {
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
          const double n = tr.norms_y[h](i, j);
          EXPECT_NEAR(tr.gamma[h](i, j, i, j), n / q2, 1e-10 * (1.0 + n));
          EXPECT_NEAR(tr.gamma_dot[h](i, j, i, j), 1.0 / q2, 1e-12);
          const double expected_pi = h < depth ? h * tr.norms_y[h + 1](i, j) : (depth - 1) * n / q2;
          EXPECT_NEAR(tr.pi[h](i, j, i, j), expected_pi, 1e-9 * (1.0 + expected_pi));
        }
      }
    }
  }
}

TEST(CntkExact, SelfKernelFromDiagonalDepthThree) {
  std::mt19937_64 rng(5);
  const auto y = random_image(4, 4, 1, rng);
  const auto tr = cntk_trace(y, y, 3, 3);
  double total = 0.0;
  for (double v : tr.pi[3].values) total += v;
  EXPECT_NEAR(tr.theta(), total / 256.0, 1e-12 * total);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(tr.pi[3](i, j, i, j), 2.0 * tr.norms_y[3](i, j) / 9.0, 1e-10);
    }
  }
}

TEST(CntkExact, CauchySchwarzBound) {
  std::mt19937_64 rng(6);
  const auto y = random_image(4, 4, 2, rng), z = random_image(4, 4, 2, rng);
  const auto tr = cntk_trace(y, z, 3, 3);
  for (int h = 1; h <= 3; ++h) {
    for (std::size_t p = 0; p < 16; ++p) {
      for (std::size_t r = 0; r < 16; ++r) {
        const double bound = std::sqrt(tr.norms_y[h].values[p] * tr.norms_z[h].values[r]) / 9.0;
        EXPECT_LE(std::abs(tr.gamma[h].values[p * 16 + r]), bound * (1.0 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST(CntkExact, LowerBound) {
  std::mt19937_64 rng(7);
  for (int depth : {2, 3, 4}) {
    const auto y = random_image(5, 5, 2, rng), z = random_image(5, 5, 2, rng);
    const auto tr = cntk_trace(y, z, 3, depth);
    double s = 0.0;
    for (double a : tr.norms_y[depth].values) {
      for (double b : tr.norms_z[depth].values) s += std::sqrt(a * b);
    }
    const double bound = (depth - 1.0) / (9.0 * 9.0 * 625.0) * s;
    EXPECT_GE(tr.theta(), bound * (1.0 - 1e-12)) << depth;
  }
}

TEST(CntkExact, ScalingAndSymmetry) {
  std::mt19937_64 rng(8);
  const auto y = random_image(4, 3, 2, rng), z = random_image(4, 3, 2, rng);
  ImageTensor cy = y;
  for (double& v : cy.values()) v *= 3.0;
  const double base = theta_cntk(y, z, 3, 3);
  EXPECT_NEAR(theta_cntk(cy, z, 3, 3), 3.0 * base, 1e-12 * std::abs(base));
  EXPECT_NEAR(theta_cntk(z, y, 3, 3), base, 1e-12 * std::abs(base));
}

TEST(CntkExact, ZeroPatchesUseZeroCosine) {
  ImageTensor y(3, 3, 1), z(3, 3, 1);
  y(0, 0, 0) = 1.0;
  z(2, 2, 0) = 1.0;
  const auto tr = cntk_trace(y, z, 1, 2);
  EXPECT_EQ(tr.gamma[1](1, 1, 1, 1), 0.0);
  EXPECT_DOUBLE_EQ(tr.gamma_dot[1](1, 1, 1, 1), 0.5);
  EXPECT_TRUE(std::isfinite(tr.theta()));
}

TEST(CntkExact, Errors) {
  const ImageTensor a(2, 2, 1), b(2, 3, 1);
  EXPECT_THROW(cntk_trace(a, b, 1, 2), DimensionError);
  EXPECT_THROW(cntk_trace(a, a, 2, 2), ParameterError);
  EXPECT_THROW(cntk_trace(a, a, 1, 0), ParameterError);
  EXPECT_THROW(ImageTensor(0, 2, 1), ParameterError);
  EXPECT_THROW(ImageTensor(1, 1, 1, {std::nan("")}), ParameterError);
  EXPECT_THROW(ImageTensor(1, 1, 2, {1.0}), DimensionError);
}

}  // namespace
}  // namespace ntksketch
