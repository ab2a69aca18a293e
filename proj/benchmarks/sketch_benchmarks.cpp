#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ntksketch/cntk_sketch.hpp"
#include "ntksketch/fwht.hpp"
#include "ntksketch/ntk_sketch.hpp"
#include "ntksketch/polysketch.hpp"
#include "ntksketch/srht.hpp"

namespace {

using namespace ntksketch;

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

SketchConfig small_taylor(int depth) {
  SketchConfig c;
  c.depth = depth;
  c.p = 1;
  c.p_prime = 1;
  c.seed = 1;
  c.dims = parse_dim_overrides("s=256,n=256,n1=256,r=256,m=256,m2=256,s_star=256");
  return c;
}

void BM_Fwht(benchmark::State& state) {
  auto v = gaussian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    fwht_inplace(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(4)->Range(1 << 8, 1 << 18);

void BM_Srht(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SrhtSketch sk(d, 1024, 2);
  const auto x = gaussian(d, 2);
  std::vector<double> out(1024), scratch;
  for (auto _ : state) {
    sk.apply(x, out, scratch);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Srht)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_PolySketchPrefixes(benchmark::State& state) {
  const auto degree = static_cast<std::size_t>(state.range(0));
  const PolySketch sk(degree, 256, 1024, 3, LeafKind::dense);
  const auto x = gaussian(256, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sk.apply_tensor_power_prefixes(x));
}
BENCHMARK(BM_PolySketchPrefixes)->DenseRange(1, 8);

void BM_NtkDense(benchmark::State& state) {
  const std::size_t d = std::size_t{1} << 16;
  const NtkSketch sk(d, small_taylor(2));
  const auto x = gaussian(d, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sk.transform(x));
}
BENCHMARK(BM_NtkDense)->Unit(benchmark::kMicrosecond);

void BM_NtkSparse(benchmark::State& state) {
  const std::size_t d = std::size_t{1} << 16;
  const NtkSketch sk(d, small_taylor(2));
  const auto dense = gaussian(d, 4);
  SparseVector x;
  x.dim = d;
  const auto stride = static_cast<std::size_t>(100 / state.range(0));
  for (std::size_t i = 0; i < d; i += stride) {
    x.indices.push_back(static_cast<std::uint32_t>(i));
    x.values.push_back(dense[i]);
  }
  state.counters["nnz"] = static_cast<double>(x.nnz());
  for (auto _ : state) benchmark::DoNotOptimize(sk.transform(x));
}
BENCHMARK(BM_NtkSparse)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_NtkDepth(benchmark::State& state) {
  const NtkSketch sk(64, small_taylor(static_cast<int>(state.range(0))));
  const auto x = gaussian(64, 5);
  for (auto _ : state) benchmark::DoNotOptimize(sk.transform(x));
}
BENCHMARK(BM_NtkDepth)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

void BM_CntkImage(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  SketchConfig c = small_taylor(2);
  const CntkSketch sk(side, side, 1, 3, c);
  const ImageTensor img(side, side, 1, gaussian(side * side, 6));
  for (auto _ : state) benchmark::DoNotOptimize(sk.transform(img));
  state.counters["pixels"] = static_cast<double>(side * side);
  state.SetComplexityN(static_cast<benchmark::IterationCount>(side * side));
}
BENCHMARK(BM_CntkImage)->Arg(8)->Arg(16)->Arg(32)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
