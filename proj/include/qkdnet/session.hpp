#pragma once

// Session driver. Every round draws from its own counter-derived stream
// (see derive_stream_seed), so rounds are independent: the serial loop is
// the reference and the OpenMP loop must reproduce it bit for bit.

#include <cstdint>
#include <optional>
#include <vector>

#include "qkdnet/adversary.hpp"
#include "qkdnet/metrics.hpp"
#include "qkdnet/protocol.hpp"
#include "qkdnet/pulse_channel.hpp"

namespace qkdnet {

enum class Execution { serial, parallel };

struct SessionOptions {
  Execution execution = Execution::parallel;
  /// Admit p_d = 0.5 (analytic-maximum studies only).
  bool allow_decoy_boundary = false;
  std::uint64_t trial = 0;
  MetricsOptions metrics;
};

struct SessionResult {
  ProtocolConfig protocol;
  ChannelConfig channel;
  AdversaryStrategy adversary;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;

  std::vector<RoundLog> logs;
  /// Rounds Eve touched, ascending round_id.
  std::vector<EveRecord> eve_records;
  SiftedKeyPair key;
  CheckSamples checks;
  MultiPhotonStats bob_sampling;
  MultiPhotonStats charlie_sampling;
  SessionMetrics metrics;

  friend bool operator==(const SessionResult&, const SessionResult&) = default;
};

struct RoundOutcome {
  RoundLog log;
  std::optional<EveRecord> eve;
  MultiPhotonStats bob_sample;
  MultiPhotonStats charlie_sample;
};

/// One full round: source, Bob's photon-number check, Bob, the Bob-Charlie
/// line (with Eve), Charlie's photon-number check, Charlie, the
/// Charlie-Alice line, Alice. Configs must already be validated.
RoundOutcome simulate_round(const ProtocolConfig& protocol, const ChannelConfig& channel,
                            const AdversaryStrategy& adversary, std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t round);

/// Validates all configs (std::invalid_argument before any round runs),
/// runs n_rounds, sifts and computes metrics. Deterministic in
/// (configs, seed, trial) and independent of execution policy / thread count.
SessionResult run_session(const ProtocolConfig& protocol, const ChannelConfig& channel,
                          const AdversaryStrategy& adversary, std::uint64_t seed, const SessionOptions& options = {});

std::optional<double> eve_information(const SessionResult& session);

}  // namespace qkdnet
