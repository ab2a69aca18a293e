#include <gtest/gtest.h>

#include "ntksketch/error.hpp"
#include "ntksketch/sketch_config.hpp"

namespace ntksketch {
namespace {

TEST(ResolveConfig, DefaultsAreConcreteAndClamped) {
  const auto r = resolve_config(SketchConfig{});
  EXPECT_EQ(r.depth, 2);
  EXPECT_EQ(r.mode, PolyMode::fitted);  // automatic Taylor levels at eps 0.25 exceed the cap
  EXPECT_TRUE(r.fell_back_to_fitted);
  for (std::size_t d : {r.dims.s, r.dims.n, r.dims.n1, r.dims.r, r.dims.m, r.dims.m2, r.dims.s_star}) {
    EXPECT_GE(d, kMinDefaultDim);
    EXPECT_LE(d, kMaxDefaultDim);
  }
}

TEST(ResolveConfig, ExplicitDegreesKeepTaylor) {
  SketchConfig c;
  c.p = 2;
  c.p_prime = 3;
  const auto r = resolve_config(c);
  EXPECT_EQ(r.mode, PolyMode::taylor);
  EXPECT_FALSE(r.fell_back_to_fitted);
  EXPECT_EQ(r.p, 2);
  EXPECT_EQ(r.p_prime, 3);
}

TEST(ResolveConfig, AutomaticDegreesUnderCap) {
  SketchConfig c;
  c.depth = 1;
  c.eps = 0.99;
  c.degree_cap = 100;
  const auto r = resolve_config(c);
  EXPECT_EQ(r.mode, PolyMode::taylor);
  EXPECT_EQ(r.p, 3);        // ceil(2 / 0.99^{4/3})
  EXPECT_EQ(r.p_prime, 10); // ceil(9 / 0.99^2)
}

TEST(ResolveConfig, OverridesWin) {
  SketchConfig c;
  c.dims = parse_dim_overrides("s=5,n=6,n1=7,r=8,m=9,m2=10,s*=11");
  const auto r = resolve_config(c);
  EXPECT_EQ(r.dims.s, 5u);
  EXPECT_EQ(r.dims.n, 6u);
  EXPECT_EQ(r.dims.n1, 7u);
  EXPECT_EQ(r.dims.r, 8u);
  EXPECT_EQ(r.dims.m, 9u);
  EXPECT_EQ(r.dims.m2, 10u);
  EXPECT_EQ(r.dims.s_star, 11u);
}

TEST(ResolveConfig, DepthZeroIsLinear) {
  SketchConfig c;
  c.depth = 0;
  const auto r = resolve_config(c);
  EXPECT_EQ(r.mode, PolyMode::taylor);
  EXPECT_EQ(r.p, 0);
  EXPECT_EQ(r.p_prime, 0);
}

TEST(ResolveConfig, RejectsInvalidValues) {
  auto bad = [](auto mutate) {
    SketchConfig c;
    mutate(c);
    EXPECT_THROW(resolve_config(c), ParameterError);
  };
  bad([](SketchConfig& c) { c.eps = 0.0; });
  bad([](SketchConfig& c) { c.eps = 1.0; });
  bad([](SketchConfig& c) { c.delta = 1.5; });
  bad([](SketchConfig& c) { c.depth = -1; });
  bad([](SketchConfig& c) { c.p = -1; });
  bad([](SketchConfig& c) { c.fitted_degree = 0; });
  bad([](SketchConfig& c) { c.osnap_sparsity = 0; });
  bad([](SketchConfig& c) { c.threads = 0; });
  bad([](SketchConfig& c) { c.dims.s = 0; });
}

TEST(ResolveConfig, CntkDimsGrowWithPixels) {
  SketchConfig c;
  c.eps = 0.9;
  c.delta = 0.5;
  c.depth = 1;
  const auto small = resolve_config(c, FeatureKind::cntk, 4);
  const auto large = resolve_config(c, FeatureKind::cntk, 4096);
  EXPECT_GE(large.dims.s, small.dims.s);
  EXPECT_GT(large.dims.m2, small.dims.m2);
}

TEST(ConfigJson, RoundTrip) {
  SketchConfig c;
  c.eps = 0.3;
  c.depth = 4;
  c.p = 2;
  c.seed = 123456789012345ULL;
  c.mode = PolyMode::fitted;
  c.fitted_degree = 6;
  c.dims.m = 512;
  c.threads = 3;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(back.eps, 0.3);
  EXPECT_EQ(back.depth, 4);
  EXPECT_EQ(back.p, 2);
  EXPECT_FALSE(back.p_prime.has_value());
  EXPECT_EQ(back.seed, 123456789012345ULL);
  EXPECT_EQ(back.mode, PolyMode::fitted);
  EXPECT_EQ(back.fitted_degree, 6);
  EXPECT_EQ(back.dims.m, 512u);
  EXPECT_FALSE(back.dims.s.has_value());
  EXPECT_EQ(back.threads, 3u);
}

TEST(ConfigJson, RejectsMalformedInput) {
  EXPECT_THROW(config_from_json("{"), FormatError);
  EXPECT_THROW(config_from_json("[1]"), FormatError);
  EXPECT_THROW(config_from_json(R"({"epsilon": 0.1})"), FormatError);
  EXPECT_THROW(config_from_json(R"({"dims": {"q": 3}})"), FormatError);
  EXPECT_THROW(config_from_json(R"({"depth": "two"})"), FormatError);
  EXPECT_THROW(config_from_json(R"({"mode": "chebyshev"})"), FormatError);
}

TEST(ConfigHash, StableAndSensitive) {
  SketchConfig c;
  c.p = 1;
  c.p_prime = 1;
  const auto a = resolve_config(c);
  EXPECT_EQ(config_hash(a), config_hash(resolve_config(c)));
  c.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(resolve_config(c)));
}

TEST(ParseHelpers, ModeAndOverrides) {
  SketchConfig c;
  parse_mode("fitted:5", c);
  EXPECT_EQ(c.mode, PolyMode::fitted);
  EXPECT_EQ(c.fitted_degree, 5);
  parse_mode("taylor", c);
  EXPECT_EQ(c.mode, PolyMode::taylor);
  EXPECT_THROW(parse_mode("fitted:0", c), ParameterError);
  EXPECT_THROW(parse_mode("fitted:x", c), ParameterError);
  EXPECT_THROW(parse_mode("exact", c), ParameterError);
  EXPECT_THROW(parse_dim_overrides("s"), ParameterError);
  EXPECT_THROW(parse_dim_overrides("k=3"), ParameterError);
  EXPECT_THROW(parse_dim_overrides("s=-3"), ParameterError);
  EXPECT_EQ(parse_dim_overrides("").s, std::nullopt);
}

}  // namespace
}  // namespace ntksketch
