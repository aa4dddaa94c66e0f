#pragma once

#include <cstdint>
#include <random>

namespace refmargin {

/// Seedable generator whose output stream is identical on every platform.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the C++
/// standard. The standard distributions are not portable, so the derived
/// draws (bounded integers, unit reals, normals) are implemented here:
///   - uniform_index: rejection sampling on the top bits (no modulo bias)
///   - uniform01: 53 high bits scaled by 2^-53, in [0,1)
///   - normal: Box-Muller, both outputs used
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  double uniform01();

  double normal();

  /// Independent child stream for (seed, stream). Used to give every
  /// Monte-Carlo trial its own generator so results do not depend on how
  /// trials are scheduled across threads.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace refmargin
