#pragma once

#include <cstdint>
#include <random>

namespace ghostlab {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream identified by (seed, stream index). Streams with
/// different indices are statistically independent, and the produced sequence
/// is identical on every platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Stream indices reserved for non-realization draws.
inline constexpr std::uint64_t kPlacementStream = 0xffffffff00000001ULL;

}  // namespace ghostlab
