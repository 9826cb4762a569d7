#pragma once

#include <cstdint>
#include <vector>

namespace lab {

// Self-contained 64-bit generator (splitmix64 steps) so that every sampled
// stream is reproducible byte-for-byte across platforms and standard-library
// versions; std::* distributions make no such guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Poisson by CDF inversion.  Large means are split into chunks so the
  // running probability never underflows; the sum of independent Poisson
  // chunks has the exact target law.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

// Seed splitting: stream k of a master seed.  Used wherever independent
// deterministic substreams are needed (one per trial / per field / per axis),
// so that permuting trial execution order cannot change any trial's draw.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace lab
