#include "oscidisc/rng.hpp"

namespace oscidisc {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (a + 0x632BE59BD9B4E019ull));
  h = splitmix64(h ^ (b + 0x85157AF5ull));
  return h;
}

}  // namespace oscidisc
