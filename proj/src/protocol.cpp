#include "qkdnet/protocol.hpp"

#include <string>

namespace qkdnet {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in [0, 1], got " + std::to_string(v));
  }
}

int mod(int a, int d) { return ((a % d) + d) % d; }

Basis basis_of(BasisKind kind, int d) { return Basis{kind, d}; }

/// Measures the pulse's shared state after a detector click; nullopt on miss.
std::optional<int> detect_and_measure(const Pulse& p, Basis basis, double eta_d, Rng& rng) {
  if (!detect(p, eta_d, rng)) return std::nullopt;
  return measure(*p.state, basis, rng).outcome;
}

[[noreturn]] void abort_round(const RoundLog& log, const std::string& why) {
  throw ProtocolAbort("round " + std::to_string(log.round_id) + ": " + why);
}

void check_range(const RoundLog& log, int v, int d, const char* what) {
  if (v < 0 || v >= d) abort_round(log, std::string(what) + " out of range: " + std::to_string(v));
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::check ? "check" : "message"; }

const char* to_string(RoundEnd end) {
  switch (end) {
    case RoundEnd::lost: return "lost";
    case RoundEnd::sampled_at_bob: return "sampled_at_bob";
    case RoundEnd::sampled_at_charlie: return "sampled_at_charlie";
    case RoundEnd::bob_check: return "bob_check";
    case RoundEnd::charlie_check: return "charlie_check";
    case RoundEnd::alice_published: return "alice_published";
  }
  return "?";
}

void ProtocolConfig::validate(bool allow_decoy_boundary) const {
  if (d < 2) throw std::invalid_argument("d must be >= 2, got " + std::to_string(d));
  require_probability(p_bm, "p_bm");
  require_probability(p_cm, "p_cm");
  require_probability(p_d, "p_d");
  if (allow_decoy_boundary ? p_d > 0.5 : p_d >= 0.5) {
    throw std::invalid_argument(std::string("p_d must be ") + (allow_decoy_boundary ? "<= 0.5" : "< 0.5") +
                                ", got " + std::to_string(p_d));
  }
  if (p_cz) require_probability(*p_cz, "p_cz");
  require_probability(sample_fraction, "sample_fraction");
  if (n_rounds == 0) throw std::invalid_argument("n_rounds must be positive");
}

std::size_t SiftedKeyPair::mismatches() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < bob_key.size(); ++i) n += bob_key[i] != charlie_key[i];
  return n;
}

QuditState alice_prepare(const ProtocolConfig& cfg) { return basis_state(cfg.d, 0); }

BobChoice draw_bob_choice(const ProtocolConfig& cfg, Rng& rng) {
  BobChoice c;
  c.mode = rng.bernoulli(cfg.p_bm) ? Mode::message : Mode::check;
  if (c.mode == Mode::message) {
    c.shift = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(cfg.d)));
    c.decoy = rng.bernoulli(cfg.p_d);
  }
  return c;
}

std::pair<BobAction, std::optional<Pulse>> bob_apply(Pulse photon, const BobChoice& choice,
                                                     const ProtocolConfig& cfg, Rng& rng, double eta_d) {
  BobAction action;
  action.mode = choice.mode;
  if (photon.empty()) {
    action.lost = true;
    return {action, std::nullopt};
  }
  if (choice.mode == Mode::check) {
    action.upstream_outcome = detect_and_measure(photon, basis_of(BasisKind::Z, cfg.d), eta_d, rng);
    action.lost = !action.upstream_outcome.has_value();
    return {action, std::nullopt};
  }
  action.shift = choice.shift;
  QuditState coded = apply(shift_op(cfg.d, choice.shift), *photon.state);
  if (choice.decoy) {
    coded = apply(hadamard(cfg.d), coded);
    action.decoy = choice.shift;
  }
  photon.state = std::move(coded);
  return {action, std::move(photon)};
}

std::pair<BobAction, std::optional<Pulse>> bob_process(Pulse photon, const ProtocolConfig& cfg, Rng& rng,
                                                       double eta_d) {
  const BobChoice choice = draw_bob_choice(cfg, rng);
  return bob_apply(std::move(photon), choice, cfg, rng, eta_d);
}

CharlieChoice draw_charlie_choice(const ProtocolConfig& cfg, Rng& rng) {
  CharlieChoice c;
  c.mode = rng.bernoulli(cfg.p_cm) ? Mode::message : Mode::check;
  if (c.mode == Mode::message)
    c.shift = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(cfg.d)));
  else
    c.basis = rng.bernoulli(cfg.effective_p_cz()) ? BasisKind::Z : BasisKind::X;
  return c;
}

std::pair<CharlieAction, std::optional<Pulse>> charlie_apply(Pulse photon, const CharlieChoice& choice,
                                                             const ProtocolConfig& cfg, Rng& rng, double eta_d) {
  CharlieAction action;
  action.mode = choice.mode;
  if (photon.empty()) {
    action.lost = true;
    return {action, std::nullopt};
  }
  if (choice.mode == Mode::check) {
    if (auto outcome = detect_and_measure(photon, basis_of(choice.basis, cfg.d), eta_d, rng))
      action.measurement = CharlieMeasurement{choice.basis, *outcome};
    else
      action.lost = true;
    return {action, std::nullopt};
  }
  action.shift = choice.shift;
  photon.state = apply(shift_op(cfg.d, choice.shift), *photon.state);
  return {action, std::move(photon)};
}

std::pair<CharlieAction, std::optional<Pulse>> charlie_process(Pulse photon, const ProtocolConfig& cfg, Rng& rng,
                                                               double eta_d) {
  const CharlieChoice choice = draw_charlie_choice(cfg, rng);
  return charlie_apply(std::move(photon), choice, cfg, rng, eta_d);
}

std::optional<int> alice_measure_publish(const Pulse& photon, const ProtocolConfig& cfg, Rng& rng, double eta_d) {
  if (photon.empty()) return std::nullopt;
  const auto final_index = detect_and_measure(photon, basis_of(BasisKind::Z, cfg.d), eta_d, rng);
  if (!final_index) return std::nullopt;
  constexpr int original_index = 0;
  return mod(*final_index - original_index, cfg.d);
}

SiftResult sift(std::span<const RoundLog> logs, int d) {
  if (d < 2) throw std::invalid_argument("sift: d must be >= 2");
  SiftResult out;
  bool first = true;
  std::uint64_t previous = 0;
  for (const RoundLog& log : logs) {
    if (!first && log.round_id <= previous) abort_round(log, "round ids not strictly increasing");
    first = false;
    previous = log.round_id;

    const bool bob_message = log.bob_mode == Mode::message;
    if (log.decoy && !bob_message) abort_round(log, "decoy announced for a checking-mode round");
    if (log.bob_upstream_outcome && bob_message) abort_round(log, "upstream check on a message-mode round");
    if (log.charlie_measurement && (!bob_message || log.charlie_mode != Mode::check))
      abort_round(log, "Charlie measurement without Bob message / Charlie check modes");
    if (log.alice_published && (!bob_message || log.charlie_mode != Mode::message))
      abort_round(log, "Alice publication without both users in message mode");
    if ((log.end == RoundEnd::bob_check) != log.bob_upstream_outcome.has_value() ||
        (log.end == RoundEnd::charlie_check) != log.charlie_measurement.has_value() ||
        (log.end == RoundEnd::alice_published) != log.alice_published.has_value())
      abort_round(log, std::string("terminal event '") + to_string(log.end) + "' disagrees with announcements");
    if (bob_message) check_range(log, log.bob_shift, d, "j_B");
    if (log.decoy) check_range(log, *log.decoy, d, "decoy index");
    if (log.charlie_mode == Mode::message && log.reached_charlie) check_range(log, log.charlie_shift, d, "j_C");

    switch (log.end) {
      case RoundEnd::bob_check:
        check_range(log, *log.bob_upstream_outcome, d, "upstream outcome");
        out.checks.bob_upstream_checks.push_back({log.round_id, 0, *log.bob_upstream_outcome});
        break;
      case RoundEnd::charlie_check: {
        const auto& m = *log.charlie_measurement;
        check_range(log, m.outcome, d, "Charlie outcome");
        const bool decoy = log.decoy.has_value();
        const int reference = log.check_reference.value_or(decoy ? *log.decoy : log.bob_shift);
        if (!decoy && m.basis == BasisKind::Z)
          out.checks.z_checks.push_back({log.round_id, reference, m.outcome});
        else if (decoy && m.basis == BasisKind::X)
          out.checks.x_checks.push_back({log.round_id, reference, m.outcome});
        break;
      }
      case RoundEnd::alice_published:
        check_range(log, *log.alice_published, d, "publication");
        if (log.decoy) break;
        out.key.positions.push_back(log.round_id);
        out.key.bob_key.push_back(log.bob_shift);
        out.key.charlie_key.push_back(mod(*log.alice_published - log.charlie_shift, d));
        break;
      case RoundEnd::lost:
      case RoundEnd::sampled_at_bob:
      case RoundEnd::sampled_at_charlie:
        break;
    }
  }
  return out;
}

}  // namespace qkdnet
