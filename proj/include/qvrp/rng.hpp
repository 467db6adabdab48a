#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qvrp {

// mt19937_64 with hand-rolled draws. std::uniform_*_distribution output is
// implementation-defined, which would break bit-reproducible runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() - (
        std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x > bound);
    return x % n;
  }

  // Exponential(1) via inversion; Gamma(1,1) for the Dirichlet construction.
  double exponential() { return -std::log1p(-uniform()); }

  // Index sampled from an explicit probability vector (CDF inversion).
  std::size_t categorical(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qvrp
