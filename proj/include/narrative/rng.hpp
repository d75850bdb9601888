#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace narrative {

// All sampling goes through a 64-bit Mersenne Twister. Its output sequence is
// fixed by the C++ standard, so a seed reproduces the same stream everywhere.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t fnv1a64(std::string_view bytes);

// Stage seed = splitmix64(seed XOR fnv1a64(stage)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

// Seed for an indexed substream, e.g. (period, document index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace narrative
