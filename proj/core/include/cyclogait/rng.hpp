#pragma once

#include <cstdint>
#include <random>

namespace cyclogait {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent deterministic stream id from (base, a, b); used to hand each
// ACO candidate and pipeline stage its own generator.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ (0x517cc1b727220a95ull * (a + 1))) ^
                    (0x2545f4914f6cdd1dull * (b + 1)));
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return std::mt19937_64(derive_seed(base, a, b));
}

}  // namespace cyclogait
