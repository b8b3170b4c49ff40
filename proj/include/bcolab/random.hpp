#pragma once

#include "bcolab/linalg.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace bcolab {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a, for turning stream names into tags.
constexpr std::uint64_t hash_tag(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed splitting: the seed of substream (tag, index) depends
/// only on (seed, tag, index), so parallel partitions reproduce serial runs.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag,
                                       std::uint64_t index = 0) noexcept {
  return mix64(mix64(seed ^ mix64(tag)) + mix64(index + 0x632be59bd9b4e019ULL));
}

/// Deterministic generator. The variate transforms are written out here rather
/// than taken from <random> distributions so that streams are bit-identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0)
      : engine_(substream_seed(seed, hash_tag(stream), index)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  double normal();
  Vector normal_vector(Eigen::Index d);
  Vector unit_vector(Eigen::Index d);
  Vector uniform_box(const Vector& lo, const Vector& hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bcolab
