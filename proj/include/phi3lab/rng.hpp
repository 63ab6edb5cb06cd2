#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace phi3lab {

// Counter-mode generator: every variate is a pure function of
// (seed, stream, counter).  Draws can therefore be assigned to threads in
// any order without changing a single bit of the output, which is what the
// reproducibility contract of the Monte Carlo drivers rests on.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ kGolden)) {}

  // SplitMix64 finalizer; full-avalanche, passes the usual batteries when
  // used in counter mode.
  static std::uint64_t mix(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t h = mix(key_ ^ mix(stream ^ 0x8e9f0d1a2b3c4d5eull));
    return mix(h ^ (counter * 0xd1342543de82ef95ull + 0x165667b19e3779f9ull));
  }

  // Uniform on the open interval (0,1); never returns 0 or 1 exactly.
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53 +
           0x1.0p-54;
  }

  // Standard normal via Box-Muller; consumes uniform counters 2c and 2c+1.
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    double u1 = uniform(stream, 2 * counter);
    double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Complex normal with independent N(0, 1/2) real and imaginary parts,
  // i.e. E|z|^2 = 1.  Consumes normal counters 2c and 2c+1.
  std::complex<double> complex_normal(std::uint64_t stream,
                                      std::uint64_t counter) const {
    constexpr double kHalf = 0.70710678118654752440;  // 1/sqrt(2)
    return {kHalf * normal(stream, 2 * counter),
            kHalf * normal(stream, 2 * counter + 1)};
  }

  // Packs a signed lattice mode and a role tag into a stream id.  Roles keep
  // draws for different purposes (initial data, time increments, weights)
  // statistically independent even at equal mode and seed.
  static std::uint64_t mode_stream(int role, int nx, int ny) {
    auto zig = [](int v) -> std::uint64_t {
      return static_cast<std::uint64_t>((v << 1) ^ (v >> 31)) & 0xffffffull;
    };
    return (static_cast<std::uint64_t>(role) << 48) | (zig(nx) << 24) |
           zig(ny);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  std::uint64_t key_;
};

}  // namespace phi3lab
