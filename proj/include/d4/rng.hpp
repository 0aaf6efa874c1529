#pragma once

// Counter-based deterministic random numbers (splitmix64) and a shifted
// Halton sequence for quasi-Monte Carlo.  Counter-based generation makes
// results independent of thread partitioning: sample i is a pure function
// of (seed, i).

#include <cstdint>

namespace d4::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// i-th sample of the stream identified by (seed, stream), in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(stream ^ splitmix64(i)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] inclusive.
inline long long uniform_int(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                             long long lo, long long hi) {
  double u = uniform(seed, stream, i);
  long long span = hi - lo + 1;
  long long v = lo + static_cast<long long>(u * static_cast<double>(span));
  return v > hi ? hi : v;
}

// Van der Corput radical inverse in the given base.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Halton point with a Cranley-Patterson rotation derived from (seed, stream).
// dim 0 uses base 2, dim 1 base 3.
inline double halton_shifted(std::uint64_t seed, std::uint64_t stream, std::uint64_t i,
                             int dim) {
  static constexpr std::uint64_t bases[] = {2, 3, 5, 7};
  double shift = uniform(seed, stream * 7 + 13, static_cast<std::uint64_t>(dim));
  double v = radical_inverse(i + 1, bases[dim]) + shift;
  return v >= 1.0 ? v - 1.0 : v;
}

}  // namespace d4::rng
