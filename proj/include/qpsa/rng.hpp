#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qpsa {

// Deterministic 64-bit generator (splitmix64). All randomness in the library
// flows through this type so that identical seeds give identical outputs on
// every run, independent of the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    // Rejection-free modulo is fine here; bias is < 2^-40 for our bounds.
    return next_u64() % bound;
  }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double(), u2 = next_double();
    while (u1 <= 1e-300) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Deterministic seed splitting: child streams for per-color / per-trial work.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng r(seed ^ (0x632be59bd9b4e019ull + tag * 0x9e3779b97f4a7c15ull));
  return r.next_u64();
}

inline std::uint64_t split_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  return split_seed(seed, h);
}

}  // namespace qpsa
