#pragma once

// Derived quantities of a session: per-class QBER, the efficiencies eta_q and
// eta_t, the Z/X check balance and its useful-outcome probability, and the
// faint-pulse detection condition P_cu >> P(n > 1 | n > 0).

#include <cstdint>
#include <optional>

#include "qkdnet/protocol.hpp"

namespace qkdnet {

struct SessionResult;

struct QberReport {
  /// Absent when the class has no samples.
  std::optional<double> z;
  std::optional<double> x;
  std::optional<double> upstream;
};

QberReport qber(const CheckSamples& samples);

struct BalancePoint {
  double p_cz = 0.0;
  double p_eu = 0.0;
};

/// (1 - p_d) p_cz = p_d (1 - p_cz) is solved by p_cz = p_d, where the useful
/// check probability is 2 (1 - p_d) p_d. Requires 0 < p_d <= 0.5.
BalancePoint balance(double p_d);

/// Probability that one of Charlie's check measurements is informative:
/// (1 - p_d) p_cz + p_d (1 - p_cz).
double useful_check_probability(double p_d, double p_cz);

struct Efficiencies {
  std::uint64_t q_u = 0;  ///< key positions
  std::uint64_t q_t = 0;  ///< photons Bob coded
  std::uint64_t b_t = 0;  ///< d-ary digits Alice published
  std::uint64_t rounds = 0;
  /// q_u / q_t and q_u / (q_t + b_t).
  std::optional<double> eta_q;
  std::optional<double> eta_t;
  /// Same ratios with every prepared photon counted in the denominator,
  /// so checking, decoy, sampling and loss overhead shows up.
  std::optional<double> eta_q_overall;
  std::optional<double> eta_t_overall;
};

Efficiencies efficiencies(const SessionResult& session);

struct PnsReport {
  double mu = 0.0;
  double p_cu = 0.0;
  double multi_photon = 0.0;
  double margin = 10.0;
  bool pass = false;
};

/// P_cu = eta_opt * eta_d against the exact multi-photon probability of a
/// non-empty pulse; passes when P_cu >= margin * that probability.
PnsReport pns_report(double mu, double eta_opt, double eta_d, double margin = 10.0);

/// Key length in bits, floor(length * log2 d); exact for powers of two.
std::uint64_t key_bits(std::uint64_t key_length, int d);

struct MetricsOptions {
  /// The photon-number alarm fires when a sampled multi-photon fraction
  /// exceeds alarm_factor times the source's expected value.
  double alarm_factor = 10.0;
  /// Margin for the P_cu detection condition.
  double detection_margin = 10.0;

  friend bool operator==(const MetricsOptions&, const MetricsOptions&) = default;
};

struct SessionMetrics {
  std::uint64_t key_length = 0;
  std::uint64_t key_bits = 0;
  std::uint64_t key_mismatches = 0;

  std::optional<double> qber_z;
  std::optional<double> qber_x;
  std::optional<double> qber_upstream;

  std::optional<double> eta_q;
  std::optional<double> eta_t;
  std::optional<double> eta_q_overall;
  std::optional<double> eta_t_overall;

  std::uint64_t useful_z_checks = 0;
  std::uint64_t useful_x_checks = 0;
  std::optional<double> p_eu_empirical;
  double p_eu_expected = 0.0;

  double p_cu = 0.0;
  double multi_photon_expected = 0.0;
  bool pns_condition_pass = false;
  /// Sampled multi-photon fraction at Bob (source side) and at Charlie
  /// (after the Bob-Charlie line, i.e. after any Eve).
  std::optional<double> multi_photon_rate_source;
  std::optional<double> multi_photon_rate;
  bool pns_alarm = false;

  /// Charlie's detector clicks per checking-mode arrival slot.
  std::optional<double> charlie_click_rate;

  std::optional<double> eve_info;

  friend bool operator==(const SessionMetrics&, const SessionMetrics&) = default;
};

SessionMetrics compute_metrics(const SessionResult& session, const MetricsOptions& options = {});

}  // namespace qkdnet
