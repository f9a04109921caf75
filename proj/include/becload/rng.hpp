#pragma once

#include <cmath>
#include <cstdint>

namespace becload {

// Deterministic, platform-independent random stream (splitmix64 core).
// std::mt19937_64 output is standardized but the distribution adaptors are
// not; all draws here are implemented explicitly so results are bit-stable
// across compilers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds (base + index)
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, 1) guaranteed > 0 (for logs)
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  // geometric occupation draw: P(k) = (1-q) q^k, k = 0,1,2,...  (Bose-Einstein marginal)
  std::int64_t geometric(double q) {
    if (q <= 0.0) return 0;
    const double u = uniform_pos();
    return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(q)));
  }

  // index draw from unnormalized weights
  template <typename Vec>
  std::size_t categorical(const Vec& weights, double total) {
    double x = uniform() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      last = i;
      x -= weights[i];
      if (x < 0.0) return i;
    }
    return last;
  }

private:
  std::uint64_t state_;
};

}  // namespace becload
