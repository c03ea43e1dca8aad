#pragma once

#include <cmath>
#include <cstdint>

namespace klr {

// Counter-based seed derivation: every (match, agent, round, purpose) tuple
// maps to an independent stream, so adding an agent or reordering decisions
// never perturbs anyone else's draws. We avoid <random> distributions on
// purpose; their output is implementation-defined and would break the
// byte-identical record contract.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(root ^ 0x7c3a9d5b2e8f01adULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0,1) with 53 bits of mantissa.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const auto r = static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * range) >> 64);
    return lo + static_cast<std::int64_t>(r);
  }

  // Box-Muller; one fresh pair of uniforms per call keeps the stream
  // position independent of how many normals a caller consumed before.
  double normal(double mean, double stddev) {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    return mean + stddev * r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
};

}  // namespace klr
