#pragma once

#include <cstdint>
#include <initializer_list>

namespace rird {

/// Counter-based deterministic generator.
///
/// Output i is mix64(key + i * PHI) where mix64 is the SplitMix64 finalizer
/// and PHI the 64-bit golden-ratio constant. Streams are split by hashing a
/// path of integers into the key, so any (seed, path) pair names a generator
/// that can be re-created in isolation, independent of draw order elsewhere.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Derives the key for a sub-stream: seed hashed with each path element.
  static CounterRng derive(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (consumes two uniforms per pair).
  double gaussian();

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rird
