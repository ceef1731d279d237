#pragma once

#include <cstdint>
#include <random>

namespace grasswalk {

using Rng = std::mt19937_64;

/// One splitmix64 round; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Independent stream `index` derived from a master seed. Streams are a pure
/// function of (seed, index), so results do not depend on scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on uniform01 (portable bit-for-bit).
double standard_normal(Rng& rng) noexcept;

}  // namespace grasswalk
