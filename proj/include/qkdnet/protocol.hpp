#pragma once

// The server/sender/receiver round: Alice prepares |0>, Bob checks or codes
// (optionally turning the photon into a decoy with H_d), Charlie checks or
// codes, Alice measures in Z_d and publishes. sift() turns the round logs
// into the key pair and the public check samples.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkdnet/pulse_channel.hpp"
#include "qkdnet/qudit.hpp"
#include "qkdnet/rng.hpp"

namespace qkdnet {

enum class Mode : std::uint8_t { check, message };

const char* to_string(Mode mode);

struct ProtocolConfig {
  int d = 2;
  /// Bob message-coding probability.
  double p_bm = 0.5;
  /// Charlie message-coding probability.
  double p_cm = 0.5;
  /// Decoy probability, must stay below 1/2.
  double p_d = 0.25;
  /// Charlie's Z-basis probability in checking mode; unset follows p_d so the
  /// useful Z and X check counts balance.
  std::optional<double> p_cz;
  /// Fraction of pulses each user destroys for the photon-number check.
  double sample_fraction = 0.0;
  std::uint64_t n_rounds = 1000;

  double effective_p_cz() const { return p_cz.value_or(p_d); }
  double p_cx() const { return 1.0 - effective_p_cz(); }

  /// Throws std::invalid_argument naming the offending field.
  /// `allow_decoy_boundary` admits p_d = 0.5, which is only meaningful for
  /// studying the analytic maximum of the useful-check probability.
  void validate(bool allow_decoy_boundary = false) const;

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Which event terminated a round. Exactly one applies per round.
enum class RoundEnd : std::uint8_t {
  lost,                ///< empty pulse, channel loss or no detector click
  sampled_at_bob,      ///< destroyed by Bob's photon-number check
  sampled_at_charlie,  ///< destroyed by Charlie's photon-number check
  bob_check,           ///< Bob measured in Z_d (upstream check)
  charlie_check,       ///< Charlie measured in Z_d or X_d
  alice_published,     ///< Alice measured and published
};

const char* to_string(RoundEnd end);

struct CharlieMeasurement {
  BasisKind basis = BasisKind::Z;
  int outcome = 0;

  friend bool operator==(const CharlieMeasurement&, const CharlieMeasurement&) = default;
};

/// Diagnostics only; never consulted by sift().
struct EveFlags {
  bool intercepted = false;
  bool replaced = false;
  bool fabricated_publication = false;

  friend bool operator==(const EveFlags&, const EveFlags&) = default;
};

struct RoundLog {
  std::uint64_t round_id = 0;
  RoundEnd end = RoundEnd::lost;

  bool reached_bob = false;
  Mode bob_mode = Mode::check;
  int bob_shift = 0;
  /// Decoy index l (the decoy state is |l>_x); set only in message mode.
  std::optional<int> decoy;
  std::optional<int> bob_upstream_outcome;

  bool reached_charlie = false;
  Mode charlie_mode = Mode::check;
  int charlie_shift = 0;
  std::optional<CharlieMeasurement> charlie_measurement;
  /// Reference value for Charlie's check as published by the server. Only the
  /// server-assisted variant sets it; otherwise Bob's own j_B / l is used.
  std::optional<int> check_reference;

  std::optional<int> alice_published;
  bool consumed_by_sampling = false;
  EveFlags eve;

  friend bool operator==(const RoundLog&, const RoundLog&) = default;
};

struct SiftedKeyPair {
  std::vector<int> bob_key;
  std::vector<int> charlie_key;
  std::vector<std::uint64_t> positions;

  std::size_t size() const { return positions.size(); }
  std::size_t mismatches() const;

  friend bool operator==(const SiftedKeyPair&, const SiftedKeyPair&) = default;
};

struct CheckPair {
  std::uint64_t round_id = 0;
  int expected = 0;
  int observed = 0;

  friend bool operator==(const CheckPair&, const CheckPair&) = default;
};

struct CheckSamples {
  /// Non-decoy photons Charlie measured in Z_d; expected j_B.
  std::vector<CheckPair> z_checks;
  /// Decoy photons Charlie measured in X_d; expected l.
  std::vector<CheckPair> x_checks;
  /// Bob's checking-mode measurements of the server's photon; expected 0.
  std::vector<CheckPair> bob_upstream_checks;

  friend bool operator==(const CheckSamples&, const CheckSamples&) = default;
};

/// Raised by sift() when the public announcements contradict each other.
class ProtocolAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

QuditState alice_prepare(const ProtocolConfig& cfg);

struct BobChoice {
  Mode mode = Mode::message;
  int shift = 0;
  bool decoy = false;
};

struct BobAction {
  Mode mode = Mode::check;
  int shift = 0;
  std::optional<int> decoy;
  std::optional<int> upstream_outcome;
  bool lost = false;
};

/// Draws mode, then (message mode) a uniform shift and the decoy coin.
BobChoice draw_bob_choice(const ProtocolConfig& cfg, Rng& rng);

/// Applies a fixed choice. Check mode measures in Z_d and consumes the
/// photon; message mode applies shift_op(d, j_B) and, for a decoy, H_d on
/// top, giving |j_B>_x. `eta_d` governs Bob's check detector.
std::pair<BobAction, std::optional<Pulse>> bob_apply(Pulse photon, const BobChoice& choice,
                                                     const ProtocolConfig& cfg, Rng& rng, double eta_d = 1.0);

std::pair<BobAction, std::optional<Pulse>> bob_process(Pulse photon, const ProtocolConfig& cfg, Rng& rng,
                                                       double eta_d = 1.0);

struct CharlieChoice {
  Mode mode = Mode::message;
  int shift = 0;
  BasisKind basis = BasisKind::Z;
};

struct CharlieAction {
  Mode mode = Mode::check;
  int shift = 0;
  std::optional<CharlieMeasurement> measurement;
  bool lost = false;
};

CharlieChoice draw_charlie_choice(const ProtocolConfig& cfg, Rng& rng);

std::pair<CharlieAction, std::optional<Pulse>> charlie_apply(Pulse photon, const CharlieChoice& choice,
                                                             const ProtocolConfig& cfg, Rng& rng,
                                                             double eta_d = 1.0);

std::pair<CharlieAction, std::optional<Pulse>> charlie_process(Pulse photon, const ProtocolConfig& cfg, Rng& rng,
                                                               double eta_d = 1.0);

/// Measures in Z_d and returns the published difference from |0>, i.e. the
/// measured index. nullopt when the pulse is empty or the detector misses.
std::optional<int> alice_measure_publish(const Pulse& photon, const ProtocolConfig& cfg, Rng& rng,
                                         double eta_d = 1.0);

struct SiftResult {
  SiftedKeyPair key;
  CheckSamples checks;
};

/// Key positions: Bob message without decoy, Charlie message, Alice
/// published. bob_key = j_B, charlie_key = (published - j_C) mod d.
/// Decoy rounds that reached Alice are deleted; basis-mismatched checks are
/// discarded. Throws ProtocolAbort on inconsistent logs.
SiftResult sift(std::span<const RoundLog> logs, int d);

}  // namespace qkdnet
