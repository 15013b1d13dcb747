#pragma once

#include <cstdint>

namespace delta_lab {

// PCG-XSH-RR 32-bit generator with a selectable stream. Sample i of a seeded
// run always draws from stream i, so results do not depend on scheduling.
struct Pcg32 {
  using result_type = std::uint32_t;

  std::uint64_t state = 0;
  std::uint64_t inc = 0;  // stream selector (odd)

  Pcg32(std::uint64_t seed, std::uint64_t stream_id) : inc((stream_id << 1u) | 1u) {
    (*this)();
    state += seed;
    (*this)();
  }

  std::uint32_t operator()() {
    const std::uint64_t old = state;
    state = old * 6364136223846793005ULL + inc;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  static constexpr std::uint32_t min() { return 0u; }
  static constexpr std::uint32_t max() { return 0xFFFFFFFFu; }
};

// Uniform on the open interval (0, 1) with 53 random bits.
inline double uniform_open01(Pcg32& rng) {
  const std::uint64_t hi = rng();
  const std::uint64_t lo = rng();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace delta_lab
