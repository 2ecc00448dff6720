#include "qkdnet/session.hpp"

#include <exception>
#include <mutex>

namespace qkdnet {

namespace {

struct RoundContext {
  const ProtocolConfig& protocol;
  const ChannelConfig& channel;
  const AdversaryStrategy& adversary;
  std::uint64_t seed;
  std::uint64_t trial;
};

/// Charlie's photon-number check on an arrival of `photons` photons.
bool charlie_samples(const RoundContext& ctx, unsigned photons, RoundOutcome& out, Rng& rng) {
  if (ctx.protocol.sample_fraction <= 0.0) return false;
  if (!sample_photon_number(photons, ctx.protocol.sample_fraction, out.charlie_sample, rng)) return false;
  out.log.end = RoundEnd::sampled_at_charlie;
  out.log.consumed_by_sampling = true;
  return true;
}

void record_charlie_choice(RoundLog& log, const CharlieChoice& cc) {
  log.reached_charlie = true;
  log.charlie_mode = cc.mode;
  if (cc.mode == Mode::message) log.charlie_shift = cc.shift;
}

/// Bob -> Eve (holding T) -> photon B of |psi->_AB -> Charlie -> Eve.
void run_epr_segment(const RoundContext& ctx, const Pulse& coded, RoundOutcome& out, Rng& rng) {
  RoundLog& log = out.log;
  log.eve.replaced = true;
  EveRecord rec{log.round_id, std::nullopt, false};

  const bool b_arrives = rng.bernoulli(ctx.channel.eta_opt);
  const CharlieChoice cc = draw_charlie_choice(ctx.protocol, rng);
  record_charlie_choice(log, cc);
  if (charlie_samples(ctx, b_arrives ? 1U : 0U, out, rng) || !b_arrives) {
    out.eve = rec;
    return;
  }

  const std::optional<int> bob_reference = log.decoy ? log.decoy : std::optional<int>(log.bob_shift);
  if (cc.mode == Mode::check) {
    if (!rng.bernoulli(ctx.channel.eta_d)) {
      out.eve = rec;
      return;
    }
    const auto r = epr_attack_round(*coded.state, cc, ctx.adversary.server_assisted_checks, bob_reference, rng);
    log.charlie_measurement = CharlieMeasurement{cc.basis, *r.charlie_outcome};
    if (ctx.adversary.server_assisted_checks) log.check_reference = r.check_reference;
    log.end = RoundEnd::charlie_check;
    rec = r.record;
  } else {
    // Photon B travels back to the server, who is Eve.
    if (!rng.bernoulli(ctx.channel.eta_opt)) {
      out.eve = rec;
      return;
    }
    const auto r = epr_attack_round(*coded.state, cc, ctx.adversary.server_assisted_checks, bob_reference, rng);
    log.alice_published = r.publication;
    log.eve.fabricated_publication = true;
    log.end = RoundEnd::alice_published;
    rec = r.record;
  }
  rec.round_id = log.round_id;
  out.eve = rec;
}

}  // namespace

RoundOutcome simulate_round(const ProtocolConfig& protocol, const ChannelConfig& channel,
                            const AdversaryStrategy& adversary, std::uint64_t seed, std::uint64_t trial,
                            std::uint64_t round) {
  const RoundContext ctx{protocol, channel, adversary, seed, trial};
  Rng rng = Rng::for_round(seed, trial, round);
  RoundOutcome out;
  RoundLog& log = out.log;
  log.round_id = round;

  const QuditState initial = alice_prepare(protocol);
  Pulse pulse = adversary.trojan_photons > 0 ? Pulse::of(adversary.trojan_photons, initial, PulseOrigin::eve)
                                             : emit_pulse(channel, initial, rng);

  if (protocol.sample_fraction > 0.0 &&
      sample_photon_number(pulse.photon_count, protocol.sample_fraction, out.bob_sample, rng)) {
    log.end = RoundEnd::sampled_at_bob;
    log.consumed_by_sampling = true;
    return out;
  }
  if (pulse.empty()) return out;

  log.reached_bob = true;
  auto [bob, forwarded] = bob_process(std::move(pulse), protocol, rng, channel.eta_d);
  log.bob_mode = bob.mode;
  if (bob.mode == Mode::check) {
    log.bob_upstream_outcome = bob.upstream_outcome;
    if (bob.upstream_outcome) log.end = RoundEnd::bob_check;
    return out;
  }
  log.bob_shift = bob.shift;
  log.decoy = bob.decoy;

  if (adversary.kind == AttackKind::epr_server) {
    run_epr_segment(ctx, *forwarded, out, rng);
    // Bob announces decoy positions, so Eve's value there never enters the key.
    if (log.decoy && out.eve) out.eve->learned_shift.reset();
    return out;
  }

  Pulse line = std::move(*forwarded);
  switch (adversary.kind) {
    case AttackKind::intercept_resend_z:
    case AttackKind::intercept_resend_x: {
      const BasisKind basis = adversary.kind == AttackKind::intercept_resend_z ? BasisKind::Z : BasisKind::X;
      auto [resent, rec] = intercept_resend(line, Basis{basis, protocol.d}, rng);
      rec.round_id = round;
      out.eve = rec;
      log.eve.intercepted = true;
      line = transmit(std::move(resent), channel.eta_opt, rng);
      break;
    }
    case AttackKind::pns_split: {
      auto [rest, rec] = pns_attack(line, adversary.eve_channel_eta, rng);
      rec.round_id = round;
      out.eve = rec;
      log.eve.intercepted = true;
      line = std::move(rest);
      break;
    }
    case AttackKind::none:
    case AttackKind::epr_server:
      line = transmit(std::move(line), channel.eta_opt, rng);
      break;
  }
  if (log.decoy && out.eve) out.eve->learned_shift.reset();

  const CharlieChoice cc = draw_charlie_choice(protocol, rng);
  record_charlie_choice(log, cc);
  if (charlie_samples(ctx, line.photon_count, out, rng)) return out;

  auto [charlie, to_alice] = charlie_apply(std::move(line), cc, protocol, rng, channel.eta_d);
  if (charlie.lost) return out;
  if (charlie.mode == Mode::check) {
    log.charlie_measurement = charlie.measurement;
    log.end = RoundEnd::charlie_check;
    return out;
  }

  const Pulse arriving = transmit(std::move(*to_alice), channel.eta_opt, rng);
  if (auto published = alice_measure_publish(arriving, protocol, rng, channel.eta_d)) {
    log.alice_published = published;
    log.end = RoundEnd::alice_published;
  }
  return out;
}

SessionResult run_session(const ProtocolConfig& protocol, const ChannelConfig& channel,
                          const AdversaryStrategy& adversary, std::uint64_t seed, const SessionOptions& options) {
  protocol.validate(options.allow_decoy_boundary);
  channel.validate();
  adversary.validate(protocol.d);

  SessionResult result;
  result.protocol = protocol;
  result.channel = channel;
  result.adversary = adversary;
  result.seed = seed;
  result.trial = options.trial;

  const auto n = static_cast<std::int64_t>(protocol.n_rounds);
  result.logs.resize(static_cast<std::size_t>(n));
  std::vector<std::optional<EveRecord>> eve(static_cast<std::size_t>(n));

  if (options.execution == Execution::serial) {
    for (std::int64_t r = 0; r < n; ++r) {
      auto o = simulate_round(protocol, channel, adversary, seed, options.trial, static_cast<std::uint64_t>(r));
      result.logs[static_cast<std::size_t>(r)] = std::move(o.log);
      eve[static_cast<std::size_t>(r)] = o.eve;
      result.bob_sampling += o.bob_sample;
      result.charlie_sampling += o.charlie_sample;
    }
  } else {
    std::exception_ptr failure;
    std::mutex merge;
#pragma omp parallel
    {
      MultiPhotonStats bob_local, charlie_local;
#pragma omp for schedule(static)
      for (std::int64_t r = 0; r < n; ++r) {
        try {
          auto o = simulate_round(protocol, channel, adversary, seed, options.trial, static_cast<std::uint64_t>(r));
          result.logs[static_cast<std::size_t>(r)] = std::move(o.log);
          eve[static_cast<std::size_t>(r)] = o.eve;
          bob_local += o.bob_sample;
          charlie_local += o.charlie_sample;
        } catch (...) {
          std::lock_guard lock(merge);
          if (!failure) failure = std::current_exception();
        }
      }
      // Integer tallies: merge order does not affect the result.
      std::lock_guard lock(merge);
      result.bob_sampling += bob_local;
      result.charlie_sampling += charlie_local;
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (auto& rec : eve)
    if (rec) result.eve_records.push_back(*rec);

  auto sifted = sift(result.logs, protocol.d);
  result.key = std::move(sifted.key);
  result.checks = std::move(sifted.checks);
  result.metrics = compute_metrics(result, options.metrics);
  return result;
}

std::optional<double> eve_information(const SessionResult& session) {
  return eve_information(session.key, session.eve_records);
}

}  // namespace qkdnet
