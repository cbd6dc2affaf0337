#pragma once

#include <cstdint>
#include <random>

namespace oscidisc {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based seed derivation: the result depends only on its arguments,
/// so streams for different (a, b) never share state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Stream identifiers used when splitting one trial seed into sub-streams.
enum class Stream : std::uint64_t {
  adjacency = 1,
  parameters = 2,
  initial_state = 3,
};

/// Thin wrapper over mt19937_64 with platform-independent real sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace oscidisc
