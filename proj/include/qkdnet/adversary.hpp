#pragma once

// Attack strategies hooked into the round: intercept-resend in either basis,
// the qubit EPR/teleportation attack of a dishonest server, and photon-number
// splitting on faint pulses. Eve's knowledge is tracked per round in
// EveRecord and scored against the sifted key by eve_information().

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "qkdnet/protocol.hpp"
#include "qkdnet/pulse_channel.hpp"
#include "qkdnet/qudit.hpp"
#include "qkdnet/rng.hpp"

namespace qkdnet {

enum class AttackKind : std::uint8_t { none, intercept_resend_z, intercept_resend_x, epr_server, pns_split };

const char* to_string(AttackKind kind);
/// Case-insensitive; accepts the names printed by to_string.
std::optional<AttackKind> parse_attack_kind(std::string_view name);

class UnsupportedStrategy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AdversaryStrategy {
  AttackKind kind = AttackKind::none;
  /// Transmission of Eve's own line (pns_split).
  double eve_channel_eta = 1.0;
  /// epr_server: reproduce protocols whose check references come from the
  /// server, letting Eve publish fake references.
  bool server_assisted_checks = false;
  /// Dishonest server replaces every source pulse with this many photons
  /// (0 = honest source).
  unsigned trojan_photons = 0;

  /// Throws UnsupportedStrategy for epr_server with d != 2, and
  /// std::invalid_argument for out-of-range parameters.
  void validate(int d) const;

  friend bool operator==(const AdversaryStrategy&, const AdversaryStrategy&) = default;
};

enum class BellOutcome : std::uint8_t { psi_minus, psi_plus, phi_minus, phi_plus };

const char* to_string(BellOutcome b);

/// Two qubits, amplitudes over |00>, |01>, |10>, |11> with qubit 0 the left
/// (most significant) factor.
class TwoQubitState {
 public:
  static TwoQubitState from_amplitudes(std::array<Complex, 4> amplitudes);
  static TwoQubitState product(const QuditState& first, const QuditState& second);
  static TwoQubitState bell(BellOutcome which);

  const std::array<Complex, 4>& amplitudes() const { return amplitudes_; }

  /// Applies a single-qubit unitary to qubit 0 or 1.
  TwoQubitState apply(int qubit, const QuditOperator& op) const;

  std::array<double, 2> qubit_distribution(int qubit, BasisKind basis) const;

  struct QubitMeasurement {
    int outcome = 0;
    /// Post-measurement state of the other qubit.
    QuditState partner;
  };
  QubitMeasurement measure_qubit(int qubit, BasisKind basis, Rng& rng) const;

 private:
  explicit TwoQubitState(std::array<Complex, 4> a) : amplitudes_(a) {}
  std::array<Complex, 4> amplitudes_{};
};

/// Born probabilities indexed by BellOutcome.
std::array<double, 4> bell_distribution(const TwoQubitState& s);

std::pair<BellOutcome, TwoQubitState> bell_measure(const TwoQubitState& s, Rng& rng);

/// Correction table for the fake publication:
/// psi- -> I, psi+ -> sigma_z, phi- -> sigma_x, phi+ -> i sigma_y.
QuditOperator fake_publication_op(BellOutcome b);

struct EveRecord {
  std::uint64_t round_id = 0;
  /// Set only when Eve holds a Z eigenstate of Bob's coding, i.e. she knows j_B.
  std::optional<int> learned_shift;
  bool caused_disturbance = false;

  friend bool operator==(const EveRecord&, const EveRecord&) = default;
};

/// Eve measures in `basis` and resends the collapsed eigenstate with the same
/// photon count. learned_shift is the Z outcome; X outcomes say nothing about j_B.
std::pair<Pulse, EveRecord> intercept_resend(const Pulse& photon, Basis basis, Rng& rng);

/// n <= 1: blocked. n >= 2: Eve keeps one photon, measures it in Z_d, and
/// forwards the other n - 1 over a line of transmission eve_channel_eta.
std::pair<Pulse, EveRecord> pns_attack(const Pulse& pulse, double eve_channel_eta, Rng& rng);

struct EprRoundResult {
  EveRecord record;
  BellOutcome bell = BellOutcome::psi_minus;
  /// Charlie's check outcome on photon B (check mode).
  std::optional<int> charlie_outcome;
  /// Reference Eve publishes for Charlie's check (server-assisted variant),
  /// present when the teleported state is an eigenstate of Charlie's basis.
  std::optional<int> check_reference;
  /// Eve's fabricated publication (message mode).
  std::optional<int> publication;
};

/// One round of the d = 2 server attack. Eve stores Bob's photon T and hands
/// Charlie photon B of |psi->_AB.
///  - Charlie codes: Eve measures T in Z (learning j_B), Bell-measures (A, B)
///    to learn j_C (psi- <-> 0, phi- <-> 1) and publishes (j_B + j_C) mod 2.
///  - Charlie checks: he measures B; Eve Bell-measures (A, T). With
///    server_assisted she publishes the reference implied by the correction
///    table, otherwise Bob's `bob_reference` is what Charlie compares to.
/// Throws UnsupportedStrategy unless bob_output is a qubit.
EprRoundResult epr_attack_round(const QuditState& bob_output, const CharlieChoice& charlie, bool server_assisted,
                                std::optional<int> bob_reference, Rng& rng);

/// Fraction of sifted key positions whose j_B Eve learned exactly. `records`
/// must be sorted by round_id. nullopt for an empty key.
std::optional<double> eve_information(const SiftedKeyPair& key, std::span<const EveRecord> records);

}  // namespace qkdnet
