#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ntksketch {

enum class PolyMode { taylor, fitted };

/// Per-dimension overrides. Unset entries are filled from the asymptotic formulas.
struct DimOverrides {
  std::optional<std::size_t> s, n, n1, r, m, m2, s_star;
};

struct SketchDims {
  std::size_t s = 0;       // phi-dot and psi dimension
  std::size_t n = 0;       // linear leaf (NTK) or derivative prefix sketch output (CNTK)
  std::size_t n1 = 0;      // derivative prefix sketch output (NTK)
  std::size_t r = 0;       // phi dimension
  std::size_t m = 0;       // covariance prefix sketch output
  std::size_t m2 = 0;      // product sketch output
  std::size_t s_star = 0;  // final feature dimension
};

/// User-facing configuration. Everything optional falls back to a documented default.
struct SketchConfig {
  double eps = 0.25;
  double delta = 0.1;
  int depth = 2;
  std::optional<int> p;        // kappa1 truncation level override
  std::optional<int> p_prime;  // kappa0 truncation level override
  DimOverrides dims;
  std::uint64_t seed = 0;
  PolyMode mode = PolyMode::taylor;
  int fitted_degree = 8;
  int degree_cap = 32;  // Taylor levels above this switch to fitted mode unless overridden
  std::size_t osnap_sparsity = 8;
  std::size_t fit_grid = 2001;
  std::size_t threads = 1;  // per-image worker threads (CNTK)
};

/// Default clamp range for dimensions derived from the asymptotic formulas.
inline constexpr std::size_t kMinDefaultDim = 64;
inline constexpr std::size_t kMaxDefaultDim = 4096;

/// Configuration with every value concrete.
struct ResolvedConfig {
  double eps = 0.0;
  double delta = 0.0;
  int depth = 0;
  int p = 0;
  int p_prime = 0;
  SketchDims dims;
  std::uint64_t seed = 0;
  PolyMode mode = PolyMode::taylor;
  int fitted_degree = 0;
  std::size_t osnap_sparsity = 0;
  std::size_t fit_grid = 0;
  std::size_t threads = 1;
  bool fell_back_to_fitted = false;  // Taylor degrees exceeded the cap
};

enum class FeatureKind { ntk, cntk };

/// Checks ranges and fills defaults. `pixels` is d1*d2 for the CNTK, which enters the logarithms
/// of the default dimensions. Throws ParameterError on invalid values.
ResolvedConfig resolve_config(const SketchConfig& config, FeatureKind kind = FeatureKind::ntk,
                              std::size_t pixels = 1);

/// Canonical JSON for provenance records and the config file format.
std::string to_json(const ResolvedConfig& config);
std::string to_json(const SketchConfig& config);

/// Parses the JSON config file format; unknown keys are rejected. Throws FormatError.
SketchConfig config_from_json(std::string_view text);

/// Parses "s=512,r=1024,..." into overrides. Throws ParameterError on unknown keys.
DimOverrides parse_dim_overrides(std::string_view text);

/// Parses "taylor" or "fitted" or "fitted:D". Throws ParameterError.
void parse_mode(std::string_view text, SketchConfig& config);

/// FNV-1a hash of the canonical JSON.
std::uint64_t config_hash(const ResolvedConfig& config);

}  // namespace ntksketch
