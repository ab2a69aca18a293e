#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ntksketch/error.hpp"
#include "ntksketch/polysketch.hpp"
#include "oracles.hpp"

namespace ntksketch {
namespace {

using testing::dot;
using testing::kron;

std::vector<std::span<const double>> spans(const std::vector<std::vector<double>>& vs) {
  return {vs.begin(), vs.end()};
}

TEST(PolySketch, TreeShape) {
  for (std::size_t p : {1u, 2u, 3u, 4u, 5u, 8u}) {
    const PolySketch q(p, 6, 16, 1);
    std::size_t padded = 1;
    while (padded < p) padded *= 2;
    EXPECT_EQ(q.degree(), p);
    EXPECT_EQ(q.padded_degree(), padded);
    EXPECT_EQ(q.leaf_count(), padded);
    EXPECT_EQ(q.internal_node_count(), padded - 1);
    EXPECT_EQ(q.output_dim(), 16u);
  }
}

TEST(PolySketch, PrefixesMatchExplicitProducts) {
  std::mt19937_64 rng(1);
  for (LeafKind kind : {LeafKind::sparse, LeafKind::dense}) {
    for (std::size_t p : {1u, 2u, 3u, 4u, 6u}) {
      const PolySketch q(p, 5, 24, 40 + p, kind);
      const auto x = testing::random_vector(5, rng);
      const auto e1 = testing::basis(5, 0);
      const auto prefixes = q.apply_tensor_power_prefixes(x);
      ASSERT_EQ(prefixes.size(), p + 1);
      for (std::size_t j = 0; j <= p; ++j) {
        std::vector<std::vector<double>> factors;
        for (std::size_t k = 0; k < p - j; ++k) factors.push_back(x);
        for (std::size_t k = 0; k < j; ++k) factors.push_back(e1);
        const auto direct = q.apply_tensor_product(spans(factors));
        for (std::size_t k = 0; k < 24; ++k) {
          EXPECT_NEAR(prefixes[j][k], direct[k], 1e-12 * (1.0 + std::abs(direct[k])))
              << "p=" << p << " j=" << j;
        }
      }
    }
  }
}

TEST(PolySketch, SparsePrefixesMatchDense) {
  std::mt19937_64 rng(2);
  const PolySketch q(3, 40, 32, 9);
  SparseVector sv{40, {1, 7, 39}, {0.5, -1.25, 2.0}};
  std::vector<double> dense(40, 0.0);
  for (std::size_t k = 0; k < sv.nnz(); ++k) dense[sv.indices[k]] = sv.values[k];
  const auto a = q.apply_tensor_power_prefixes(sv);
  const auto b = q.apply_tensor_power_prefixes(dense);
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(a[j][k], b[j][k], 1e-12);
  }
  const PolySketch dense_tree(3, 40, 32, 9, LeafKind::dense);
  const auto c = dense_tree.apply_tensor_power_prefixes(sv);
  const auto d = dense_tree.apply_tensor_power_prefixes(dense);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(c[j], d[j]);
}

TEST(PolySketch, MultilinearInEachFactor) {
  std::mt19937_64 rng(3);
  const PolySketch q(3, 4, 16, 5);
  std::vector<std::vector<double>> f = {testing::random_vector(4, rng), testing::random_vector(4, rng),
                                        testing::random_vector(4, rng)};
  const auto w = testing::random_vector(4, rng);
  for (std::size_t slot = 0; slot < 3; ++slot) {
    auto g = f, h = f;
    h[slot] = w;
    for (std::size_t i = 0; i < 4; ++i) g[slot][i] = 3.0 * f[slot][i] - w[i];
    const auto a = q.apply_tensor_product(spans(g));
    const auto b = q.apply_tensor_product(spans(f));
    const auto c = q.apply_tensor_product(spans(h));
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(a[k], 3.0 * b[k] - c[k], 1e-11);
  }
}

TEST(PolySketch, ZeroFactorGivesZero) {
  std::mt19937_64 rng(4);
  const PolySketch q(4, 6, 16, 6);
  std::vector<std::vector<double>> f(4, testing::random_vector(6, rng));
  f[2].assign(6, 0.0);
  for (double v : q.apply_tensor_product(spans(f))) EXPECT_EQ(v, 0.0);
}

TEST(PolySketch, UnbiasedAgainstExplicitTensors) {
  std::mt19937_64 rng(5);
  const auto x = testing::random_unit_vector(3, rng), y = testing::random_unit_vector(3, rng);
  for (std::size_t p : {2u, 3u}) {
    const double truth = dot(testing::tensor_power(x, static_cast<int>(p)),
                             testing::tensor_power(y, static_cast<int>(p)));
    std::vector<double> samples;
    for (int seed = 0; seed < 3000; ++seed) {
      const PolySketch q(p, 3, 16, static_cast<std::uint64_t>(seed));
      samples.push_back(dot(q.apply_tensor_power_prefixes(x)[0], q.apply_tensor_power_prefixes(y)[0]));
    }
    const auto stat = testing::mean_and_error(samples);
    EXPECT_NEAR(stat.mean, truth, 3.0 * stat.std_error) << "p=" << p;
  }
}

TEST(PolySketch, MixedProductUnbiased) {
  std::mt19937_64 rng(6);
  const auto a = testing::random_vector(3, rng), b = testing::random_vector(3, rng);
  const auto c = testing::random_vector(3, rng), d = testing::random_vector(3, rng);
  const double truth = dot(kron(a, b), kron(c, d));
  std::vector<double> samples;
  for (int seed = 0; seed < 3000; ++seed) {
    const PolySketch q(2, 3, 16, static_cast<std::uint64_t>(seed), LeafKind::dense);
    const std::vector<std::span<const double>> left = {a, b}, right = {c, d};
    samples.push_back(dot(q.apply_tensor_product(left), q.apply_tensor_product(right)));
  }
  const auto stat = testing::mean_and_error(samples);
  EXPECT_NEAR(stat.mean, truth, 3.0 * stat.std_error);
}

TEST(PolySketch, PreservesNormsOfTensorPowers) {
  std::mt19937_64 rng(7);
  const auto x = testing::random_unit_vector(16, rng);
  for (std::size_t p : {2u, 3u}) {
    int failures = 0;
    const int seeds = 1000;
    for (int seed = 0; seed < seeds; ++seed) {
      const PolySketch q(p, 16, 2048, static_cast<std::uint64_t>(seed));
      if (std::abs(testing::norm2(q.apply_tensor_power_prefixes(x)[0]) - 1.0) > 0.3) ++failures;
    }
    EXPECT_LT(static_cast<double>(failures) / seeds, 0.05) << "p=" << p;
  }
}

TEST(PolySketch, BasisPowerHasUnitNormOnAverage) {
  std::mt19937_64 rng(10);
  const auto x = testing::random_vector(5, rng);
  std::vector<double> norms;
  for (int seed = 0; seed < 2000; ++seed) {
    const PolySketch q(3, 5, 16, static_cast<std::uint64_t>(seed));
    norms.push_back(testing::norm2(q.apply_tensor_power_prefixes(x)[3]));
  }
  const auto stat = testing::mean_and_error(norms);
  EXPECT_NEAR(stat.mean, 1.0, 3.0 * stat.std_error);
}

TEST(PolySketch, OrthonormalFactorProducts) {
  const auto e1 = testing::basis(4, 0), e2 = testing::basis(4, 1);
  const std::vector<std::span<const double>> ab = {e1, e2}, ba = {e2, e1};
  std::vector<double> same, cross;
  for (int seed = 0; seed < 2000; ++seed) {
    const PolySketch q(2, 4, 16, static_cast<std::uint64_t>(seed));
    const auto u = q.apply_tensor_product(ab), v = q.apply_tensor_product(ba);
    same.push_back(dot(u, u));
    cross.push_back(dot(u, v));
  }
  const auto s = testing::mean_and_error(same), c = testing::mean_and_error(cross);
  EXPECT_NEAR(s.mean, 1.0, 3.0 * s.std_error);
  EXPECT_NEAR(c.mean, 0.0, 3.0 * c.std_error);
}

TEST(PolySketch, DegreeOneIsTheLeafMap) {
  std::mt19937_64 rng(11);
  const PolySketch q(1, 8, 16, 12);
  const auto x = testing::random_vector(8, rng);
  const auto prefixes = q.apply_tensor_power_prefixes(x);
  ASSERT_EQ(prefixes.size(), 2u);
  const std::vector<std::span<const double>> fx = {x};
  EXPECT_EQ(prefixes[0], q.apply_tensor_product(fx));
  const auto e1 = testing::basis(8, 0);
  const std::vector<std::span<const double>> fe = {e1};
  EXPECT_EQ(prefixes[1], q.apply_tensor_product(fe));
  EXPECT_EQ(PolySketch(1, 8, 16, 12).apply_tensor_power_prefixes(x), prefixes);
}

TEST(PolySketch, AllBasisPrefixIsSketchOfBasisTensor) {
  std::mt19937_64 rng(8);
  const PolySketch q(3, 5, 16, 3);
  const auto prefixes = q.apply_tensor_power_prefixes(testing::random_vector(5, rng));
  const auto e1 = testing::basis(5, 0);
  const std::vector<std::span<const double>> basis_factors = {e1, e1, e1};
  const auto direct = q.apply_tensor_product(basis_factors);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(prefixes[3][k], direct[k], 1e-12);
}

TEST(PolySketch, WorkspaceReuseIsStable) {
  std::mt19937_64 rng(9);
  const PolySketch q(3, 8, 16, 2);
  PolySketch::Workspace ws;
  const auto x = testing::random_vector(8, rng), y = testing::random_vector(8, rng);
  std::vector<std::vector<double>> out(4);
  q.apply_tensor_power_prefixes(y, out, ws);
  q.apply_tensor_power_prefixes(x, out, ws);
  EXPECT_EQ(out, q.apply_tensor_power_prefixes(x));
}

TEST(PolySketch, RejectsBadArguments) {
  EXPECT_THROW(PolySketch(0, 4, 4, 1), ParameterError);
  EXPECT_THROW(PolySketch(2, 0, 4, 1), ParameterError);
  EXPECT_THROW(PolySketch(2, 4, 0, 1), ParameterError);
  const PolySketch q(2, 4, 8, 1);
  EXPECT_THROW(q.apply_tensor_power_prefixes(std::vector<double>(3, 1.0)), DimensionError);
  const std::vector<double> v(4, 1.0);
  const std::vector<std::span<const double>> one = {v};
  EXPECT_THROW(q.apply_tensor_product(one), DimensionError);
}

}  // namespace
}  // namespace ntksketch
