#pragma once

// Physical layer: ideal and faint-laser sources, per-photon fiber loss,
// threshold detectors without dark counts, and the photon-number sampling
// check used against multi-photon (Trojan-horse) signals.

#include <cstdint>
#include <optional>
#include <span>

#include "qkdnet/qudit.hpp"
#include "qkdnet/rng.hpp"

namespace qkdnet {

enum class PulseOrigin { server, eve };

/// A signal on the line. Every photon of a pulse shares one polarization
/// state; `state` is present iff photon_count > 0.
struct Pulse {
  unsigned photon_count = 0;
  std::optional<QuditState> state;
  PulseOrigin origin = PulseOrigin::server;
  /// Set when a photon-number check destroyed the pulse.
  bool consumed = false;

  static Pulse vacuum(PulseOrigin origin = PulseOrigin::server) { return Pulse{0, std::nullopt, origin, false}; }
  static Pulse of(unsigned n, QuditState s, PulseOrigin origin = PulseOrigin::server);

  bool empty() const { return photon_count == 0; }

  friend bool operator==(const Pulse&, const Pulse&) = default;
};

struct ChannelConfig {
  /// Mean photon number of a faint-laser source; nullopt is an ideal
  /// deterministic single-photon source.
  std::optional<double> mu;
  double eta_opt = 1.0;
  double eta_d = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct MultiPhotonStats {
  std::uint64_t sampled = 0;
  std::uint64_t empty = 0;
  std::uint64_t single = 0;
  std::uint64_t multi = 0;

  MultiPhotonStats& operator+=(const MultiPhotonStats& o) {
    sampled += o.sampled;
    empty += o.empty;
    single += o.single;
    multi += o.multi;
    return *this;
  }

  /// multi / (single + multi); nullopt when no non-empty pulse was sampled.
  std::optional<double> multi_fraction_nonempty() const;

  friend bool operator==(const MultiPhotonStats&, const MultiPhotonStats&) = default;
};

/// mu^n e^{-mu} / n!
double poisson_pmf(int n, double mu);

/// P(n > 1 | n > 0) = (1 - (1 + mu) e^{-mu}) / (1 - e^{-mu}), approximately mu / 2.
double multi_photon_given_nonempty(double mu);

Pulse emit_pulse(const ChannelConfig& cfg, const QuditState& state, Rng& rng);

/// Each photon survives independently with probability eta_opt.
Pulse transmit(Pulse p, double eta_opt, Rng& rng);

/// Threshold detector: clicks with probability 1 - (1 - eta_d)^n.
bool detect(const Pulse& p, double eta_d, Rng& rng);

/// Samples one signal of `photon_count` photons with probability `fraction`,
/// tallying it into `stats`. Returns true when the signal was taken.
bool sample_photon_number(unsigned photon_count, double fraction, MultiPhotonStats& stats, Rng& rng);

/// Samples each pulse with probability `fraction`; sampled pulses are
/// destroyed in place (vacuum, consumed = true) and tallied by photon number.
MultiPhotonStats pns_sample_check(std::span<Pulse> pulses, double fraction, Rng& rng);

}  // namespace qkdnet
