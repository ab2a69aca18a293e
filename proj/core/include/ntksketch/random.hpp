#pragma once

#include <array>
#include <cstdint>

namespace ntksketch {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Derives an independent 64-bit seed for a named sub-component. Used to split one user seed
/// into the many sketch instances a feature map needs: derive_seed(seed, id) for distinct ids
/// yields streams that do not overlap.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component) noexcept;

/// Counter-based random stream keyed by (seed, component). The i-th draw depends only on the key
/// and i, so a stream is reproducible regardless of thread scheduling or platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t component) noexcept;
  explicit RandomStream(std::uint64_t key) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double next_uniform() noexcept;
  /// Standard normal via Box-Muller. Platform-independent, unlike std::normal_distribution.
  double next_normal() noexcept;
  /// +1.0 or -1.0 with equal probability.
  double next_sign() noexcept;
  /// Uniform integer in [0, bound). Unbiased (rejection sampling). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Component ids for the sketch instances inside one feature map. Keeping them in one place
/// guarantees no two instances share a stream.
namespace component {
inline constexpr std::uint64_t kLinearLeaf = 1;      // Q^1
inline constexpr std::uint64_t kInputSrht = 2;       // S
inline constexpr std::uint64_t kCovariancePoly = 3;  // Q^{2p+2}
inline constexpr std::uint64_t kCovarianceSrht = 4;  // T
inline constexpr std::uint64_t kDerivativePoly = 5;  // Q^{2p'+1}
inline constexpr std::uint64_t kDerivativeSrht = 6;  // W
inline constexpr std::uint64_t kProductPoly = 7;     // Q^2
inline constexpr std::uint64_t kMixSrht = 8;         // R
inline constexpr std::uint64_t kBaseSrht = 9;        // V
inline constexpr std::uint64_t kGaussian = 10;       // G
inline constexpr std::uint64_t kFittedPoly = 11;
inline constexpr std::uint64_t kFittedSrht = 12;
}  // namespace component

}  // namespace ntksketch
