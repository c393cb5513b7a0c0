#pragma once

#include <cstdint>

#include "tghar/num.hpp"

namespace tghar {

/// PCG XSL-RR 128/64 generator. Self-contained so that streams are
/// reproducible across platforms and standard library versions; the
/// distribution code below is likewise fixed (std::normal_distribution is
/// implementation defined and would break run-to-run comparisons).
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  explicit Pcg64(std::uint64_t seed, std::uint64_t stream = 0) {
    inc_ = ((static_cast<u128>(stream) << 1u) | 1u);
    state_ = 0u;
    next_u64();
    state_ += seed;
    next_u64();
  }

  std::uint64_t next_u64() {
    const u128 old = state_;
    state_ = old * kMultiplier + inc_;
    const auto xored =
        static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
    const auto rot = static_cast<unsigned>(old >> 122);
    return (xored >> rot) | (xored << ((-rot) & 63u));
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
  std::uint64_t operator()() { return next_u64(); }

  /// Uniform draw on the open interval (0,1), 53-bit resolution.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw by quantile inversion.
  double next_normal() { return num::norm_quantile(next_uniform()); }

 private:
  using u128 = unsigned __int128;
  static constexpr u128 kMultiplier =
      (static_cast<u128>(2549297995355413924ull) << 64) |
      4865540595714422341ull;

  u128 state_;
  u128 inc_;
};

/// Independent generator for a work unit (replication, forecast draw set,
/// ...). Units get distinct PCG streams under a shared seed, so results do
/// not depend on scheduling order.
inline Pcg64 substream(std::uint64_t seed, std::uint64_t unit) {
  return Pcg64(seed, 0x9e3779b97f4a7c15ull ^ unit);
}

}  // namespace tghar
