#include "qkdnet/metrics.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdnet/adversary.hpp"
#include "qkdnet/session.hpp"

namespace qkdnet {

namespace {

std::optional<double> mismatch_rate(const std::vector<CheckPair>& pairs) {
  if (pairs.empty()) return std::nullopt;
  std::size_t bad = 0;
  for (const auto& p : pairs) bad += p.expected != p.observed;
  return static_cast<double>(bad) / static_cast<double>(pairs.size());
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

bool alarm(const MultiPhotonStats& s, double expected, double factor) {
  const auto f = s.multi_fraction_nonempty();
  return f && *f > factor * expected;
}

}  // namespace

QberReport qber(const CheckSamples& samples) {
  return {mismatch_rate(samples.z_checks), mismatch_rate(samples.x_checks),
          mismatch_rate(samples.bob_upstream_checks)};
}

BalancePoint balance(double p_d) {
  if (!(p_d > 0.0 && p_d <= 0.5)) throw std::invalid_argument("balance: p_d must be in (0, 0.5], got " + std::to_string(p_d));
  return {p_d, 2.0 * (1.0 - p_d) * p_d};
}

double useful_check_probability(double p_d, double p_cz) { return (1.0 - p_d) * p_cz + p_d * (1.0 - p_cz); }

Efficiencies efficiencies(const SessionResult& session) {
  Efficiencies e;
  e.rounds = session.protocol.n_rounds;
  e.q_u = session.key.size();
  for (const auto& log : session.logs) {
    if (log.reached_bob && log.bob_mode == Mode::message) ++e.q_t;
    if (log.alice_published) ++e.b_t;
  }
  e.eta_q = ratio(e.q_u, e.q_t);
  e.eta_t = ratio(e.q_u, e.q_t + e.b_t);
  e.eta_q_overall = ratio(e.q_u, e.rounds);
  e.eta_t_overall = ratio(e.q_u, e.rounds + e.b_t);
  return e;
}

PnsReport pns_report(double mu, double eta_opt, double eta_d, double margin) {
  PnsReport r;
  r.mu = mu;
  r.p_cu = eta_opt * eta_d;
  r.multi_photon = mu > 0.0 ? multi_photon_given_nonempty(mu) : 0.0;
  r.margin = margin;
  r.pass = r.p_cu >= margin * r.multi_photon;
  return r;
}

std::uint64_t key_bits(std::uint64_t key_length, int d) {
  if (d < 2) throw std::invalid_argument("key_bits: d must be >= 2");
  const auto ud = static_cast<unsigned>(d);
  if (std::has_single_bit(ud)) return key_length * static_cast<std::uint64_t>(std::countr_zero(ud));
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(key_length) * std::log2(static_cast<double>(d))));
}

SessionMetrics compute_metrics(const SessionResult& session, const MetricsOptions& options) {
  SessionMetrics m;
  const auto& p = session.protocol;
  m.key_length = session.key.size();
  m.key_bits = key_bits(m.key_length, p.d);
  m.key_mismatches = session.key.mismatches();

  const auto q = qber(session.checks);
  m.qber_z = q.z;
  m.qber_x = q.x;
  m.qber_upstream = q.upstream;

  const auto eff = efficiencies(session);
  m.eta_q = eff.eta_q;
  m.eta_t = eff.eta_t;
  m.eta_q_overall = eff.eta_q_overall;
  m.eta_t_overall = eff.eta_t_overall;

  std::uint64_t charlie_measured = 0;
  std::uint64_t charlie_slots = 0;
  for (const auto& log : session.logs) {
    if (!log.reached_charlie || log.charlie_mode != Mode::check || log.end == RoundEnd::sampled_at_charlie) continue;
    ++charlie_slots;
    if (log.charlie_measurement) ++charlie_measured;
  }
  m.useful_z_checks = session.checks.z_checks.size();
  m.useful_x_checks = session.checks.x_checks.size();
  m.p_eu_empirical = ratio(m.useful_z_checks + m.useful_x_checks, charlie_measured);
  m.p_eu_expected = useful_check_probability(p.p_d, p.effective_p_cz());
  m.charlie_click_rate = ratio(charlie_measured, charlie_slots);

  const double mu = session.channel.mu.value_or(0.0);
  const auto report = pns_report(mu, session.channel.eta_opt, session.channel.eta_d, options.detection_margin);
  m.p_cu = report.p_cu;
  m.multi_photon_expected = report.multi_photon;
  m.pns_condition_pass = report.pass;
  m.multi_photon_rate_source = session.bob_sampling.multi_fraction_nonempty();
  m.multi_photon_rate = session.charlie_sampling.multi_fraction_nonempty();
  m.pns_alarm = alarm(session.bob_sampling, report.multi_photon, options.alarm_factor) ||
                alarm(session.charlie_sampling, report.multi_photon, options.alarm_factor);

  m.eve_info = eve_information(session.key, session.eve_records);
  return m;
}

}  // namespace qkdnet
