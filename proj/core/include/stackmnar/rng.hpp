// Seed derivation for reproducible, parallelism-independent RNG streams.
// Each unit of independent work (imputation chain, replicate, bootstrap
// draw sequence) owns a private stream keyed by (seed, path...).
#ifndef STACKMNAR_RNG_HPP
#define STACKMNAR_RNG_HPP

#include <cstdint>
#include <random>

namespace stackmnar {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b));
  h = splitmix64(h ^ splitmix64(c));
  return h;
}

inline Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) {
  return Rng(mix_seed(seed, a, b, c));
}

}  // namespace stackmnar

#endif
