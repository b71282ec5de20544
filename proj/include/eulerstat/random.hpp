#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace eulerstat {

/// Identifier written into run metadata; bump when seeding or draw order
/// changes.
inline constexpr std::string_view prng_algorithm = "splitmix64-seeded-mt19937_64/v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream (base, sample, stream). Distinct triples give
/// statistically independent generators.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t sample,
                                 std::uint64_t stream = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ sample) ^ (stream + 0x51ed27f1ULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace eulerstat
