#include "qkdnet/adversary.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace qkdnet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t index_of(int q0, int q1) { return static_cast<std::size_t>(2 * q0 + q1); }

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::intercept_resend_z: return "intercept_resend_z";
    case AttackKind::intercept_resend_x: return "intercept_resend_x";
    case AttackKind::epr_server: return "epr_server";
    case AttackKind::pns_split: return "pns_split";
  }
  return "?";
}

std::optional<AttackKind> parse_attack_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto k : {AttackKind::none, AttackKind::intercept_resend_z, AttackKind::intercept_resend_x,
                 AttackKind::epr_server, AttackKind::pns_split})
    if (lower == to_string(k)) return k;
  return std::nullopt;
}

void AdversaryStrategy::validate(int d) const {
  if (kind == AttackKind::epr_server && d != 2)
    throw UnsupportedStrategy("adversary epr_server requires d = 2, got d = " + std::to_string(d));
  if (!(eve_channel_eta >= 0.0 && eve_channel_eta <= 1.0))
    throw std::invalid_argument("eve_channel_eta must be in [0, 1], got " + std::to_string(eve_channel_eta));
}

const char* to_string(BellOutcome b) {
  switch (b) {
    case BellOutcome::psi_minus: return "psi_minus";
    case BellOutcome::psi_plus: return "psi_plus";
    case BellOutcome::phi_minus: return "phi_minus";
    case BellOutcome::phi_plus: return "phi_plus";
  }
  return "?";
}

TwoQubitState TwoQubitState::from_amplitudes(std::array<Complex, 4> amplitudes) {
  double n = 0.0;
  for (const auto& a : amplitudes) n += std::norm(a);
  if (std::abs(n - 1.0) > kStateTolerance) throw std::invalid_argument("TwoQubitState: amplitudes not normalized");
  return TwoQubitState(amplitudes);
}

TwoQubitState TwoQubitState::product(const QuditState& first, const QuditState& second) {
  if (first.dim() != 2 || second.dim() != 2) throw std::invalid_argument("TwoQubitState::product: qubits required");
  std::array<Complex, 4> a{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a[index_of(i, j)] = first[i] * second[j];
  return TwoQubitState(a);
}

TwoQubitState TwoQubitState::bell(BellOutcome which) {
  const double s = kInvSqrt2;
  switch (which) {
    case BellOutcome::psi_minus: return TwoQubitState({0.0, s, -s, 0.0});
    case BellOutcome::psi_plus: return TwoQubitState({0.0, s, s, 0.0});
    case BellOutcome::phi_minus: return TwoQubitState({s, 0.0, 0.0, -s});
    case BellOutcome::phi_plus: return TwoQubitState({s, 0.0, 0.0, s});
  }
  throw std::invalid_argument("unknown Bell outcome");
}

TwoQubitState TwoQubitState::apply(int qubit, const QuditOperator& op) const {
  if (op.dim() != 2) throw std::invalid_argument("TwoQubitState::apply: qubit operator required");
  if (qubit != 0 && qubit != 1) throw std::invalid_argument("TwoQubitState::apply: qubit must be 0 or 1");
  std::array<Complex, 4> out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex acc{};
      for (int k = 0; k < 2; ++k) {
        acc += qubit == 0 ? op(i, k) * amplitudes_[index_of(k, j)] : op(j, k) * amplitudes_[index_of(i, k)];
      }
      out[index_of(i, j)] = acc;
    }
  return TwoQubitState(out);
}

namespace {

/// Unnormalized partner amplitudes after projecting `qubit` onto `e`.
std::array<Complex, 2> project(const std::array<Complex, 4>& amps, int qubit, const QuditState& e) {
  std::array<Complex, 2> partner{};
  for (int other = 0; other < 2; ++other) {
    Complex acc{};
    for (int k = 0; k < 2; ++k) {
      const auto idx = qubit == 0 ? index_of(k, other) : index_of(other, k);
      acc += std::conj(e[k]) * amps[idx];
    }
    partner[static_cast<std::size_t>(other)] = acc;
  }
  return partner;
}

}  // namespace

std::array<double, 2> TwoQubitState::qubit_distribution(int qubit, BasisKind basis) const {
  if (qubit != 0 && qubit != 1) throw std::invalid_argument("qubit must be 0 or 1");
  std::array<double, 2> p{};
  for (int k = 0; k < 2; ++k) {
    const auto partner = project(amplitudes_, qubit, eigenvector(Basis{basis, 2}, k));
    p[static_cast<std::size_t>(k)] = std::norm(partner[0]) + std::norm(partner[1]);
  }
  return p;
}

TwoQubitState::QubitMeasurement TwoQubitState::measure_qubit(int qubit, BasisKind basis, Rng& rng) const {
  const auto p = qubit_distribution(qubit, basis);
  const int outcome = sample_index(p, rng);
  auto partner = project(amplitudes_, qubit, eigenvector(Basis{basis, 2}, outcome));
  const double norm = std::sqrt(p[static_cast<std::size_t>(outcome)]);
  return {outcome, QuditState::from_amplitudes({partner[0] / norm, partner[1] / norm})};
}

std::array<double, 4> bell_distribution(const TwoQubitState& s) {
  std::array<double, 4> p{};
  for (int b = 0; b < 4; ++b) {
    const auto v = TwoQubitState::bell(static_cast<BellOutcome>(b)).amplitudes();
    Complex acc{};
    for (std::size_t i = 0; i < 4; ++i) acc += std::conj(v[i]) * s.amplitudes()[i];
    p[static_cast<std::size_t>(b)] = std::norm(acc);
  }
  return p;
}

std::pair<BellOutcome, TwoQubitState> bell_measure(const TwoQubitState& s, Rng& rng) {
  const auto p = bell_distribution(s);
  const auto which = static_cast<BellOutcome>(sample_index(p, rng));
  return {which, TwoQubitState::bell(which)};
}

QuditOperator fake_publication_op(BellOutcome b) {
  const Complex one{1.0, 0.0};
  switch (b) {
    case BellOutcome::psi_minus: return identity_op(2);
    case BellOutcome::psi_plus: return QuditOperator::from_matrix(2, {one, 0.0, 0.0, -one});
    case BellOutcome::phi_minus: return shift_op(2, 1);
    case BellOutcome::phi_plus: return QuditOperator::from_matrix(2, {0.0, one, -one, 0.0});
  }
  throw std::invalid_argument("unknown Bell outcome");
}

std::pair<Pulse, EveRecord> intercept_resend(const Pulse& photon, Basis basis, Rng& rng) {
  EveRecord rec;
  if (photon.empty()) return {photon, rec};
  const auto m = measure(*photon.state, basis, rng);
  if (basis.kind == BasisKind::Z) rec.learned_shift = m.outcome;
  rec.caused_disturbance = !equal_up_to_phase(m.collapsed, *photon.state);
  return {Pulse::of(photon.photon_count, m.collapsed, PulseOrigin::eve), rec};
}

std::pair<Pulse, EveRecord> pns_attack(const Pulse& pulse, double eve_channel_eta, Rng& rng) {
  EveRecord rec;
  if (pulse.photon_count < 2) return {Pulse::vacuum(PulseOrigin::eve), rec};
  const Basis z{BasisKind::Z, pulse.state->dim()};
  rec.learned_shift = measure(*pulse.state, z, rng).outcome;
  Pulse rest = Pulse::of(pulse.photon_count - 1, *pulse.state, PulseOrigin::eve);
  return {transmit(std::move(rest), eve_channel_eta, rng), rec};
}

EprRoundResult epr_attack_round(const QuditState& bob_output, const CharlieChoice& charlie, bool server_assisted,
                                std::optional<int> bob_reference, Rng& rng) {
  if (bob_output.dim() != 2) throw UnsupportedStrategy("epr_attack_round requires qubits (d = 2)");
  EprRoundResult r;
  // Qubit 0 is Eve's photon A, qubit 1 is photon B sent to Charlie.
  const TwoQubitState pair = TwoQubitState::bell(BellOutcome::psi_minus);

  if (charlie.mode == Mode::message) {
    const TwoQubitState coded = pair.apply(1, shift_op(2, charlie.shift));
    const int j_b = measure(bob_output, Basis{BasisKind::Z, 2}, rng).outcome;
    auto [bell, collapsed] = bell_measure(coded, rng);
    const bool psi_family = bell == BellOutcome::psi_minus || bell == BellOutcome::psi_plus;
    const int j_c = psi_family ? 0 : 1;
    r.bell = bell;
    r.record.learned_shift = j_b;
    r.publication = (j_b + j_c) % 2;
    return r;
  }

  const auto b_meas = pair.measure_qubit(1, charlie.basis, rng);
  r.charlie_outcome = b_meas.outcome;
  auto [bell, collapsed] = bell_measure(TwoQubitState::product(b_meas.partner, bob_output), rng);
  r.bell = bell;
  if (server_assisted) {
    const QuditState teleported = apply(fake_publication_op(bell), bob_output);
    const auto p = born_distribution(teleported, Basis{charlie.basis, 2});
    const auto best = std::max_element(p.begin(), p.end());
    if (*best > 1.0 - kStateTolerance) r.check_reference = static_cast<int>(best - p.begin());
  }
  const auto reference = server_assisted ? r.check_reference : bob_reference;
  r.record.caused_disturbance = reference.has_value() && *reference != b_meas.outcome;
  return r;
}

std::optional<double> eve_information(const SiftedKeyPair& key, std::span<const EveRecord> records) {
  if (key.size() == 0) return std::nullopt;
  std::size_t learned = 0;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const auto it = std::lower_bound(records.begin(), records.end(), key.positions[i],
                                     [](const EveRecord& r, std::uint64_t id) { return r.round_id < id; });
    if (it != records.end() && it->round_id == key.positions[i] && it->learned_shift &&
        *it->learned_shift == key.bob_key[i])
      ++learned;
  }
  return static_cast<double>(learned) / static_cast<double>(key.size());
}

}  // namespace qkdnet
