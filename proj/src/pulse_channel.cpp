#include "qkdnet/pulse_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkdnet {

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in [0, 1], got " + std::to_string(v));
  }
}

}  // namespace

Pulse Pulse::of(unsigned n, QuditState s, PulseOrigin origin) {
  if (n == 0) return vacuum(origin);
  return Pulse{n, std::move(s), origin, false};
}

void ChannelConfig::validate() const {
  if (mu && !(*mu >= 0.0 && std::isfinite(*mu))) {
    throw std::invalid_argument("mu must be finite and >= 0, got " + std::to_string(*mu));
  }
  require_unit_interval(eta_opt, "eta_opt");
  require_unit_interval(eta_d, "eta_d");
}

std::optional<double> MultiPhotonStats::multi_fraction_nonempty() const {
  const std::uint64_t nonempty = single + multi;
  if (nonempty == 0) return std::nullopt;
  return static_cast<double>(multi) / static_cast<double>(nonempty);
}

double poisson_pmf(int n, double mu) {
  if (n < 0) throw std::invalid_argument("poisson_pmf: n must be >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson_pmf: mu must be finite and >= 0");
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double multi_photon_given_nonempty(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("multi_photon_given_nonempty: mu must be > 0");
  // expm1 keeps the small-mu numerator and denominator accurate:
  //   1 - e^{-mu}            = -expm1(-mu)
  //   1 - (1 + mu) e^{-mu}   = -expm1(-mu) - mu e^{-mu}
  const double nonempty = -std::expm1(-mu);
  return (nonempty - mu * std::exp(-mu)) / nonempty;
}

Pulse emit_pulse(const ChannelConfig& cfg, const QuditState& state, Rng& rng) {
  const unsigned n = cfg.mu ? rng.poisson(*cfg.mu) : 1U;
  return Pulse::of(n, state, PulseOrigin::server);
}

Pulse transmit(Pulse p, double eta_opt, Rng& rng) {
  if (p.empty() || eta_opt >= 1.0) return p;
  unsigned survivors = 0;
  for (unsigned i = 0; i < p.photon_count; ++i)
    if (rng.bernoulli(eta_opt)) ++survivors;
  if (survivors == 0) return Pulse::vacuum(p.origin);
  p.photon_count = survivors;
  return p;
}

bool detect(const Pulse& p, double eta_d, Rng& rng) {
  if (p.empty()) return false;
  const double miss = std::pow(1.0 - eta_d, static_cast<double>(p.photon_count));
  return rng.bernoulli(1.0 - miss);
}

bool sample_photon_number(unsigned photon_count, double fraction, MultiPhotonStats& stats, Rng& rng) {
  if (!rng.bernoulli(fraction)) return false;
  ++stats.sampled;
  if (photon_count == 0)
    ++stats.empty;
  else if (photon_count == 1)
    ++stats.single;
  else
    ++stats.multi;
  return true;
}

MultiPhotonStats pns_sample_check(std::span<Pulse> pulses, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("pns_sample_check: fraction must be in (0, 1], got " + std::to_string(fraction));
  }
  MultiPhotonStats stats;
  for (auto& p : pulses) {
    if (sample_photon_number(p.photon_count, fraction, stats, rng)) {
      p = Pulse::vacuum(p.origin);
      p.consumed = true;
    }
  }
  return stats;
}

}  // namespace qkdnet
