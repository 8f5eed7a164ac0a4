#pragma once

#include <cmath>
#include <cstdint>

namespace vdtk {

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so parallel schedules cannot change results and
// any pixel/frame can be regenerated independently.
//
// Determinism note: the integer mixing and *,/,sqrt are bit-exact under
// IEEE-754; std::log/std::cos in the normal draw depend on libm, so
// bit-reproducibility across platforms holds per libm implementation and is
// exact on any one platform.

namespace rng {

// Fixed stream ids so independent consumers never collide.
enum Stream : std::uint64_t {
  kPairConfidence = 1,
  kPairScale = 2,
  kPointmapNoise = 3,
  kJitterCarrier = 4,
  kJitterPixel = 5,
  kDriftOffset = 6,
  kGaussianPixel = 7,
  kDenoiseNoise = 8,
  kTest = 99,
};

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream + 0x6a09e667f3bcc909ULL));
  h = mix64(h ^ (counter + 0x3c6ef372fe94f82bULL));
  return h;
}

// Uniform in (0, 1]: never exactly zero so log() below is safe.
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t counter) {
  return static_cast<double>((hash(seed, stream, counter) >> 11) + 1) *
         0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform_in(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter, double lo, double hi) {
  double u = static_cast<double>(hash(seed, stream, counter) >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

// Standard normal via Box-Muller on two decorrelated counters.
inline double normal(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t counter) {
  const double u1 = uniform(seed, stream, 2 * counter);
  const double u2 = uniform(seed, stream, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace rng
}  // namespace vdtk
