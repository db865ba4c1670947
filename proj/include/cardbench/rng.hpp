// Deterministic seed derivation and low-discrepancy sequences shared by the
// generator, the optimizer, and the stress/robustness tooling.
#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace cardbench {

// SplitMix64 step; used to derive independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a hash of a string, for mixing identifiers into seed streams.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Child seed for a named stream: hash the tag into the parent seed and mix.
inline std::uint64_t derive_seed(std::uint64_t parent, const std::string& tag,
                                 std::uint64_t index = 0) {
  return splitmix64(fnv1a(tag, parent ^ 0x9e3779b97f4a7c15ULL) + index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Radical-inverse (van der Corput) sequence in the given prime base.
inline double radical_inverse(int base, std::uint64_t index) {
  double inv_base = 1.0 / base;
  double inv = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * inv;
    index /= base;
    inv *= inv_base;
  }
  return result;
}

// d-th coordinate of the (index+1)-th Halton point; d < 8.
inline double halton(int dim, std::uint64_t index) {
  static constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  return radical_inverse(kPrimes[dim % 8], index + 1);
}

}  // namespace cardbench
