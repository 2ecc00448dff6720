#include "qkdnet/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdnet {

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t trial, std::uint64_t round) {
  const std::uint64_t k0 = splitmix64(root);
  const std::uint64_t k1 = splitmix64(k0 ^ trial);
  return splitmix64(k1 ^ round);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

unsigned Rng::poisson(double mu) {
  if (mu < 0.0 || !std::isfinite(mu)) throw std::invalid_argument("poisson: mu must be finite and >= 0");
  if (mu == 0.0) return 0;
  // Sum of independent Poisson variables is Poisson; keep each chunk small
  // enough that e^{-chunk} does not underflow the inversion.
  unsigned total = 0;
  double remaining = mu;
  while (remaining > 0.0) {
    const double chunk = remaining > 16.0 ? 16.0 : remaining;
    remaining -= chunk;
    const double u = uniform();
    double p = std::exp(-chunk);
    double cdf = p;
    unsigned n = 0;
    while (u >= cdf && n < 1000) {
      ++n;
      p *= chunk / n;
      cdf += p;
    }
    total += n;
  }
  return total;
}

}  // namespace qkdnet
