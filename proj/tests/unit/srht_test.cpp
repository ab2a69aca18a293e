#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ntksketch/error.hpp"
#include "ntksketch/srht.hpp"
#include "oracles.hpp"

namespace ntksketch {
namespace {

using testing::dot;
using testing::hadamard_entry;
using testing::kron;

// Entry k of an SRHT built from its own sign and row tables with an explicit Hadamard matrix.
std::vector<double> explicit_srht(const SrhtSketch& s, std::span<const double> x) {
  std::vector<double> out(s.output_dim(), 0.0);
  for (std::size_t k = 0; k < s.output_dim(); ++k) {
    const std::size_t row = s.sampled_rows()[k];
    for (std::size_t j = 0; j < x.size(); ++j) {
      out[k] += hadamard_entry(row, j) * s.sign_flips()[j] * x[j];
    }
    out[k] /= std::sqrt(static_cast<double>(s.output_dim()));
  }
  return out;
}

TEST(Srht, StructureInvariants) {
  const SrhtSketch s(100, 40, 9);
  EXPECT_EQ(s.input_dim(), 100u);
  EXPECT_EQ(s.padded_dim(), 128u);
  EXPECT_EQ(s.output_dim(), 40u);
  for (double v : s.sign_flips()) EXPECT_EQ(std::abs(v), 1.0);
  for (auto r : s.sampled_rows()) EXPECT_LT(r, 128u);
}

TEST(Srht, MatchesExplicitMatrix) {
  std::mt19937_64 rng(1);
  for (std::size_t d : {1u, 7u, 16u, 50u}) {
    const SrhtSketch s(d, 24, 100 + d);
    const auto x = testing::random_vector(d, rng);
    const auto fast = s.apply(x);
    const auto slow = explicit_srht(s, x);
    for (std::size_t k = 0; k < fast.size(); ++k) EXPECT_NEAR(fast[k], slow[k], 1e-12);
  }
}

TEST(Srht, ZeroAndLinearity) {
  std::mt19937_64 rng(2);
  const SrhtSketch s(33, 20, 5);
  for (double v : s.apply(std::vector<double>(33, 0.0))) EXPECT_EQ(v, 0.0);
  const auto x = testing::random_vector(33, rng);
  const auto y = testing::random_vector(33, rng);
  std::vector<double> x2(33), combo(33);
  for (std::size_t i = 0; i < 33; ++i) {
    x2[i] = 2.0 * x[i];
    combo[i] = 0.5 * x[i] - 3.0 * y[i];
  }
  const auto sx = s.apply(x), sy = s.apply(y), s2 = s.apply(x2), sc = s.apply(combo);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(s2[k], 2.0 * sx[k]);
    EXPECT_NEAR(sc[k], 0.5 * sx[k] - 3.0 * sy[k], 1e-12 * (1.0 + std::abs(sc[k])));
  }
}

TEST(Srht, DeterministicInSeed) {
  std::mt19937_64 rng(3);
  const auto x = testing::random_vector(20, rng);
  EXPECT_EQ(SrhtSketch(20, 10, 77).apply(x), SrhtSketch(20, 10, 77).apply(x));
  EXPECT_NE(SrhtSketch(20, 10, 77).apply(x), SrhtSketch(20, 10, 78).apply(x));
}

TEST(Srht, RejectsBadDimensions) {
  EXPECT_THROW(SrhtSketch(0, 4, 1), ParameterError);
  EXPECT_THROW(SrhtSketch(4, 0, 1), ParameterError);
  const SrhtSketch s(4, 4, 1);
  EXPECT_THROW(s.apply(std::vector<double>(5, 1.0)), DimensionError);
}

TEST(Srht, NormConcentrationOverSeeds) {
  std::mt19937_64 rng(4);
  const auto x = testing::random_unit_vector(64, rng);
  int failures = 0;
  const int seeds = 1000;
  for (int seed = 0; seed < seeds; ++seed) {
    const SrhtSketch s(64, 512, static_cast<std::uint64_t>(seed));
    if (std::abs(testing::norm2(s.apply(x)) - 1.0) > 0.3) ++failures;
  }
  EXPECT_LT(static_cast<double>(failures) / seeds, 0.05);
}

TEST(Srht, NormConcentrationManyVectors) {
  std::mt19937_64 rng(5);
  for (int v = 0; v < 20; ++v) {
    const auto x = testing::random_unit_vector(64, rng);
    int failures = 0;
    for (int seed = 0; seed < 1000; ++seed) {
      const SrhtSketch s(64, 512, static_cast<std::uint64_t>(seed * 31 + v));
      if (std::abs(testing::norm2(s.apply(x)) - 1.0) > 0.3) ++failures;
    }
    EXPECT_LT(failures, 50) << "vector " << v;
  }
}

TEST(TensorSrht, MatchesExplicitFormula) {
  std::mt19937_64 rng(6);
  const TensorSrhtSketch t(5, 3, 16, 11);
  const auto x = testing::random_vector(5, rng);
  const auto y = testing::random_vector(3, rng);
  const auto out = t.apply(x, y);
  for (std::size_t k = 0; k < 16; ++k) {
    double hx = 0.0, hy = 0.0;
    for (std::size_t j = 0; j < 5; ++j) hx += hadamard_entry(t.left_rows()[k], j) * t.left_sign_flips()[j] * x[j];
    for (std::size_t j = 0; j < 3; ++j) hy += hadamard_entry(t.right_rows()[k], j) * t.right_sign_flips()[j] * y[j];
    EXPECT_NEAR(out[k], hx * hy / 4.0, 1e-12);
  }
}

TEST(TensorSrht, ZeroAndBilinearity) {
  std::mt19937_64 rng(7);
  const TensorSrhtSketch t(4, 4, 32, 2);
  const auto x = testing::random_vector(4, rng);
  const auto y = testing::random_vector(4, rng);
  const auto w = testing::random_vector(4, rng);
  for (double v : t.apply(std::vector<double>(4, 0.0), y)) EXPECT_EQ(v, 0.0);
  for (double v : t.apply(x, std::vector<double>(4, 0.0))) EXPECT_EQ(v, 0.0);
  std::vector<double> yw(4);
  for (int i = 0; i < 4; ++i) yw[i] = 2.0 * y[i] + w[i];
  const auto a = t.apply(x, yw), b = t.apply(x, y), c = t.apply(x, w);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(a[k], 2.0 * b[k] + c[k], 1e-12);
}

TEST(TensorSrht, BasisTensorHasUnitNorm) {
  std::vector<double> norms;
  for (int seed = 0; seed < 2000; ++seed) {
    const TensorSrhtSketch t(4, 4, 8, static_cast<std::uint64_t>(seed));
    norms.push_back(testing::norm2(t.apply(testing::basis(4, 0), testing::basis(4, 0))));
  }
  const auto stat = testing::mean_and_error(norms);
  EXPECT_NEAR(stat.mean, 1.0, 3.0 * stat.std_error + 1e-12);
}

TEST(TensorSrht, UnbiasedInnerProduct) {
  std::mt19937_64 rng(8);
  const auto x = testing::random_vector(4, rng), y = testing::random_vector(4, rng);
  const auto z = testing::random_vector(4, rng), w = testing::random_vector(4, rng);
  const double truth = dot(kron(x, y), kron(z, w));
  std::vector<double> samples;
  for (int seed = 0; seed < 2000; ++seed) {
    const TensorSrhtSketch t(4, 4, 16, static_cast<std::uint64_t>(seed));
    samples.push_back(dot(t.apply(x, y), t.apply(z, w)));
  }
  const auto stat = testing::mean_and_error(samples);
  EXPECT_NEAR(stat.mean, truth, 3.0 * stat.std_error);
}

TEST(TensorSrht, SpreadAndCombineReproduceApply) {
  std::mt19937_64 rng(9);
  const TensorSrhtSketch t(6, 10, 12, 4);
  const auto x = testing::random_vector(6, rng), y = testing::random_vector(10, rng);
  std::vector<double> l(t.left_padded_dim()), r(t.right_padded_dim()), out(12);
  t.spread_left(x, l);
  t.spread_right(y, r);
  t.combine(l, r, out);
  EXPECT_EQ(out, t.apply(x, y));
  std::vector<double> b(t.left_padded_dim()), e(t.left_padded_dim());
  t.spread_left_basis(b);
  t.spread_left(testing::basis(6, 0), e);
  EXPECT_EQ(b, e);
}

TEST(TensorSrht, RejectsMismatchedInputs) {
  const TensorSrhtSketch t(4, 3, 8, 1);
  EXPECT_THROW(t.apply(std::vector<double>(3, 1.0), std::vector<double>(3, 1.0)), DimensionError);
  EXPECT_THROW(TensorSrhtSketch(4, 3, 0, 1), ParameterError);
}

}  // namespace
}  // namespace ntksketch
