#include "lab/rng.hpp"

#include <cmath>

namespace lab {

std::uint64_t Rng::poisson(double mean) {
  std::uint64_t total = 0;
  // e^-500 ~ 7e-218 stays comfortably inside double range.
  while (mean > 500.0) {
    double chunk = 500.0;
    mean -= chunk;
    double p = std::exp(-chunk), cdf = p, u = uniform();
    std::uint64_t n = 0;
    while (u > cdf && n < 100000) {
      ++n;
      p *= chunk / static_cast<double>(n);
      cdf += p;
    }
    total += n;
  }
  double p = std::exp(-mean), cdf = p, u = uniform();
  std::uint64_t n = 0;
  while (u > cdf && n < 100000) {
    ++n;
    p *= mean / static_cast<double>(n);
    cdf += p;
  }
  return total + n;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer applied to master advanced by the stream index.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace lab
