#pragma once

#include <cstdint>
#include <random>

namespace ldp {

using Rng = std::mt19937_64;

/// Name recorded in output metadata so runs can be reproduced.
inline constexpr const char* kRngName = "mt19937_64/seed_seq(seed,stream)";

/// Independent, reproducible stream `stream` derived from a master seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace ldp
