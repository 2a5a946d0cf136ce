#pragma once

#include <cstdint>
#include <random>

namespace drestlab {

// splitmix64 finalizer; used to derive independent streams from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based split: stream `counter` of `master` never depends on how many
// other streams were drawn before it.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  return mix_seed(mix_seed(master) ^ mix_seed(counter + 0x632be59bd9b4e019ULL));
}

// Portable random source. The standard distributions are implementation
// defined, so uniform draws are built directly from the engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int below(int n) {
    const auto bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<int>(draw % bound);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace drestlab
