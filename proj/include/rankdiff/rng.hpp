#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rankdiff {

// Counter-based random numbers.  Each (seed, domain, stream) triple names an
// independent substream and the k-th variate of a substream is a pure
// function of k, so particle i can always pull "its" Gaussian for step t no
// matter how work is scheduled across threads, and a coupled pair of systems
// can share one noise stream exactly.
//
// Construction: SplitMix64 finalizer over key + counter * golden gamma.
// SplitMix64 is well studied and passes the usual batteries; streams are
// separated by hashing the ids into the key, which puts them at effectively
// random offsets of the underlying sequence.
namespace rng {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Domains keep draws made for different purposes out of each other's way.
enum Domain : std::uint64_t {
  kInitDomain = 1,
  kStepDomain = 2,
  kScratchDomain = 3,
};

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t domain,
                                std::uint64_t stream) {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ (domain * 0xD1B54A32D192ED03ull));
  k = mix64(k ^ (stream * 0x8CB92BA72F3D8DD7ull));
  return k;
}

inline std::uint64_t bits(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + counter * kGamma);
}

// Uniform on (0,1]: never 0, so log() below is safe.
inline double uniform_pos(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>((bits(key, counter) >> 11) + 1) * 0x1.0p-53;
}

// Uniform on [0,1).
inline double uniform(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(bits(key, counter) >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0,1), safe to feed to quantile functions
// that diverge at either end.
inline double uniform_open(std::uint64_t key, std::uint64_t counter) {
  return (static_cast<double>(bits(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
inline double gaussian(std::uint64_t key, std::uint64_t counter) {
  const double u1 = uniform_pos(key, 2 * counter);
  const double u2 = uniform(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rng

} // namespace rankdiff
