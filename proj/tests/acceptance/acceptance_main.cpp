// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Usage: acceptance [path/to/qkdsim]. Without the CLI path the
// determinism criterion falls back to rendering through the library.
//
// Sampled quantities use a 3 sigma binomial band unless noted.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qkdnet/config.hpp"
#include "qkdnet/metrics.hpp"
#include "qkdnet/qudit.hpp"
#include "qkdnet/report.hpp"
#include "qkdnet/session.hpp"

using namespace qkdnet;

namespace {

// Pinned tolerances.
constexpr double kSigmas = 3.0;
constexpr double kOverlapTol = 1e-12;
constexpr double kHadamardTol = 1e-9;
constexpr double kPoissonTarget = 0.024782;
constexpr double kPoissonTol = 1e-6;
constexpr double kRoundedClaim = 0.025;  // "about 2.5%"
constexpr double kRoundedClaimTol = 0.0005;
constexpr double kEfficiencyRelTol = 0.01;
constexpr std::uint64_t kSeed = 20240611;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

bool within(double observed, double p, double n) { return std::abs(observed - p) <= kSigmas * sigma(p, n) + 1e-12; }

/// Two-sample comparison of error rates on a pooled binomial variance.
bool rates_match(double a, double na, double b, double nb) {
  const double pooled = (a * na + b * nb) / (na + nb);
  return std::abs(a - b) <= kSigmas * std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)) + 1e-12;
}

Result mutual_unbiasedness() {
  double worst = 0.0;
  for (int d = 2; d <= 16; ++d)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) worst = std::max(worst, std::abs(overlap_probability(d, k, l) - 1.0 / d));
  return {worst <= kOverlapTol, fmt("max |overlap - 1/d| = %.2e over d = 2..16 (tol %.0e)", worst, kOverlapTol)};
}

Result hadamard_correctness() {
  double map_err = 0.0, unitary_err = 0.0;
  for (int d = 2; d <= 16; ++d) {
    const auto h = hadamard(d);
    unitary_err = std::max(unitary_err, max_abs_diff(h * h.adjoint(), identity_op(d)));
    for (int j = 0; j < d; ++j) {
      const auto got = apply(h, basis_state(d, j));
      const auto want = x_basis_state(d, j);
      for (int k = 0; k < d; ++k) map_err = std::max(map_err, std::abs(got[k] - want[k]));
    }
  }
  return {map_err <= kHadamardTol && unitary_err <= kHadamardTol,
          fmt("max |H|j> - |j>_x| = %.2e, max |HH^+ - I| = %.2e (tol %.0e)", map_err, unitary_err, kHadamardTol)};
}

Result poisson_claims() {
  const double mu = 0.05;
  const double exact = multi_photon_given_nonempty(mu);
  const bool literal = std::abs(exact - kPoissonTarget) <= kPoissonTol;
  const bool rounded = std::abs(exact - kRoundedClaim) <= kRoundedClaimTol;

  ChannelConfig c;
  c.mu = mu;
  Rng rng(kSeed);
  constexpr int n = 1'000'000;
  std::vector<Pulse> pulses;
  pulses.reserve(n);
  for (int i = 0; i < n; ++i) pulses.push_back(emit_pulse(c, basis_state(2, 0), rng));
  const auto stats = pns_sample_check(pulses, 1.0, rng);
  const double p0 = stats.empty / double(n);
  const double nonempty = double(stats.single + stats.multi);
  const double multi = *stats.multi_fraction_nonempty();
  const bool sim = within(p0, std::exp(-mu), n) && within(multi, exact, nonempty);

  return {literal && rounded && sim,
          fmt("exact P(n>1|n>0, 0.05) = %.7f vs required %.6f +/- %.0e: %s; ~2.5%%: %s; "
              "1e6 pulses P0 = %.6f (exp %.6f), multi = %.6f (exp %.6f): %s",
              exact, kPoissonTarget, kPoissonTol, literal ? "ok" : "MISMATCH", rounded ? "ok" : "no", p0,
              std::exp(-mu), multi, exact, sim ? "ok" : "out of band")};
}

Result balance_and_maximum() {
  bool ok = true;
  std::string detail;
  for (double pd : {0.1, 0.3, 0.5}) {
    ProtocolConfig p;
    p.d = 2;
    p.p_bm = 0.9;
    p.p_cm = 0.2;
    p.p_d = pd;
    p.n_rounds = 100'000;
    SessionOptions o;
    o.allow_decoy_boundary = true;
    const auto r = run_session(p, {}, {}, kSeed, o);
    const auto& m = r.metrics;
    const double useful = double(m.useful_z_checks + m.useful_x_checks);
    const double z_share = m.useful_z_checks / useful;
    const double measured = useful / *m.p_eu_empirical;
    const double expected = 2.0 * (1.0 - pd) * pd;
    const bool balanced = within(z_share, 0.5, useful);
    const bool rate = within(*m.p_eu_empirical, expected, measured);
    ok = ok && balanced && rate;
    detail += fmt("p_d=%.1f: Z/X %llu/%llu%s, p_eu %.4f vs %.4f%s; ", pd, (unsigned long long)m.useful_z_checks,
                  (unsigned long long)m.useful_x_checks, balanced ? "" : " UNBALANCED", *m.p_eu_empirical, expected,
                  rate ? "" : " OFF");
  }
  return {ok, detail};
}

Result honest_runs() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 4, 8}) {
    ProtocolConfig p;
    p.d = d;
    p.n_rounds = 10'000;
    p.p_bm = 0.6;
    p.p_cm = 0.6;
    p.p_d = 0.2;
    const auto r = run_session(p, {}, {}, kSeed);
    const auto& m = r.metrics;
    const bool clean = m.qber_z == 0.0 && m.qber_x == 0.0 && m.qber_upstream == 0.0 && r.key.size() > 0 &&
                       r.key.bob_key == r.key.charlie_key &&
                       m.key_bits == r.key.size() * static_cast<std::uint64_t>(std::log2(d));
    ok = ok && clean;
    detail += fmt("d=%d key %llu (%llu bits)%s; ", d, (unsigned long long)r.key.size(),
                  (unsigned long long)m.key_bits, clean ? "" : " FAILED");
  }
  return {ok, detail};
}

Result efficiency_limits() {
  ProtocolConfig p;
  p.d = 2;
  p.p_bm = 0.999;
  p.p_cm = 0.999;
  p.p_d = 0.001;
  p.n_rounds = 100'000;
  const auto r = run_session(p, {}, {}, kSeed);
  const double eq = *r.metrics.eta_q, et = *r.metrics.eta_t;
  const bool ok = std::abs(eq - 1.0) <= kEfficiencyRelTol && std::abs(et - 0.5) <= kEfficiencyRelTol * 0.5;
  return {ok, fmt("p_bm = p_cm = 0.999, p_d = 0.001: eta_q = %.5f (-> 1), eta_t = %.5f (-> 0.5), rel tol %.0e", eq,
                  et, kEfficiencyRelTol)};
}

Result intercept_resend_detection() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 4}) {
    ProtocolConfig p;
    p.d = d;
    p.p_bm = 0.9;
    p.p_cm = 0.2;
    p.p_d = 0.4;
    p.n_rounds = 100'000;
    AdversaryStrategy eve;
    eve.kind = AttackKind::intercept_resend_z;
    const auto r = run_session(p, {}, eve, kSeed);
    const double nx = double(r.checks.x_checks.size());
    const double expected = (d - 1.0) / d;
    const bool x_ok = nx > 0 && within(*r.metrics.qber_x, expected, nx);
    const bool z_ok = r.metrics.qber_z == 0.0;
    ok = ok && x_ok && z_ok;
    detail += fmt("d=%d decoy X QBER %.4f vs %.4f (n=%.0f)%s, Z QBER %.4f%s; ", d, *r.metrics.qber_x, expected, nx,
                  x_ok ? "" : " OFF", r.metrics.qber_z.value_or(-1.0), z_ok ? "" : " NONZERO");
  }
  return {ok, detail};
}

Result epr_contrast() {
  ProtocolConfig p;
  p.d = 2;
  p.p_bm = 0.9;
  p.p_cm = 0.5;
  p.p_d = 0.3;
  p.n_rounds = 100'000;
  AdversaryStrategy eve;
  eve.kind = AttackKind::epr_server;
  eve.server_assisted_checks = true;
  const auto assisted = run_session(p, {}, eve, kSeed);
  eve.server_assisted_checks = false;
  const auto fixed = run_session(p, {}, eve, kSeed);

  const auto& a = assisted.metrics;
  const bool a_ok = a.eve_info == 1.0 && a.qber_z == 0.0 && a.qber_x == 0.0 && assisted.key.mismatches() == 0;
  const auto& f = fixed.metrics;
  const double nz = double(fixed.checks.z_checks.size()), nx = double(fixed.checks.x_checks.size());
  const bool f_ok = within(*f.qber_z, 0.5, nz) && within(*f.qber_x, 0.5, nx);
  return {a_ok && f_ok, fmt("server-assisted: eve_info %.4f, QBER Z %.4f X %.4f; fixed |0>: QBER Z %.4f (n=%.0f) "
                            "X %.4f (n=%.0f) vs 0.5",
                            a.eve_info.value_or(-1.0), a.qber_z.value_or(-1.0), a.qber_x.value_or(-1.0), *f.qber_z,
                            nz, *f.qber_x, nx)};
}

Result pns_attack_and_alarm() {
  const double mu = 0.05;
  ProtocolConfig p;
  p.d = 2;
  p.p_bm = 0.9;
  p.p_cm = 0.6;
  p.p_d = 0.2;
  p.n_rounds = 1'000'000;
  ChannelConfig line;
  line.mu = mu;
  AdversaryStrategy eve;
  eve.kind = AttackKind::pns_split;
  eve.eve_channel_eta = 1.0;

  const auto base = run_session(p, line, {}, kSeed);
  const auto attacked = run_session(p, line, eve, kSeed + 1);
  const auto& b = base.metrics;
  const auto& m = attacked.metrics;

  bool qber_ok = true;
  const std::pair<const std::vector<CheckPair>*, const std::vector<CheckPair>*> classes[] = {
      {&base.checks.z_checks, &attacked.checks.z_checks},
      {&base.checks.x_checks, &attacked.checks.x_checks},
      {&base.checks.bob_upstream_checks, &attacked.checks.bob_upstream_checks}};
  for (const auto& [bc, ac] : classes) {
    auto rate = [](const std::vector<CheckPair>& v) {
      std::size_t bad = 0;
      for (const auto& c : v) bad += c.expected != c.observed;
      return v.empty() ? 0.0 : double(bad) / double(v.size());
    };
    if (bc->empty() || ac->empty()) {
      qber_ok = false;
      continue;
    }
    qber_ok = qber_ok && rates_match(rate(*bc), double(bc->size()), rate(*ac), double(ac->size()));
  }
  const bool info_ok = m.eve_info == 1.0;

  // Photon-number monitoring on, dishonest server sending two-photon pulses.
  ProtocolConfig sampled = p;
  sampled.sample_fraction = 0.1;
  sampled.n_rounds = 100'000;
  AdversaryStrategy flooding = eve;
  flooding.trojan_photons = 2;
  const auto watched = run_session(sampled, line, flooding, kSeed + 2);
  const bool alarm_ok = watched.metrics.pns_alarm;

  const bool report_ok = pns_report(mu, 1.0, 1.0).pass && !pns_report(mu, 0.02, 1.0).pass;

  return {qber_ok && info_ok && alarm_ok && report_ok,
          fmt("monitoring off: eve_info %.4f on %llu key digits, QBER Z/X/up attacked %.4f/%.4f/%.4f vs honest "
              "%.4f/%.4f/%.4f %s, click rate %.5f vs %.5f; monitoring 0.1: sampled multi %.4f vs 10 x %.5f, "
              "alarm %s; P_cu 1.0 %s, 0.02 %s",
              m.eve_info.value_or(-1.0), (unsigned long long)attacked.key.size(), m.qber_z.value_or(-1.0),
              m.qber_x.value_or(-1.0), m.qber_upstream.value_or(-1.0), b.qber_z.value_or(-1.0),
              b.qber_x.value_or(-1.0), b.qber_upstream.value_or(-1.0), qber_ok ? "match" : "DIFFER",
              m.charlie_click_rate.value_or(-1.0), b.charlie_click_rate.value_or(-1.0),
              watched.metrics.multi_photon_rate_source.value_or(-1.0), watched.metrics.multi_photon_expected,
              alarm_ok ? "fired" : "SILENT", pns_report(mu, 1.0, 1.0).pass ? "pass" : "fail",
              pns_report(mu, 0.02, 1.0).pass ? "pass" : "fail")};
}

const char* kDeterminismConfigs[] = {
    "d = 4\nn_rounds = 20000\np_bm = 0.6\np_cm = 0.6\np_d = 0.2\nmu = 0.3\neta_opt = 0.8\nseed = 5\ntrials = 2\n",
    "d = 2\nn_rounds = 20000\np_bm = 0.8\np_cm = 0.5\np_d = 0.3\nadversary = epr_server\nseed = 6\n",
    "d = 2\nn_rounds = 20000\np_bm = 0.8\np_cm = 0.5\np_d = 0.3\nmu = 0.1\nadversary = pns_split\n"
    "sample_fraction = 0.05\nseed = 7\n",
    "d = 3\nn_rounds = 20000\np_bm = 0.8\np_cm = 0.5\np_d = 0.3\nadversary = intercept_resend_x\nseed = 8\n",
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result determinism(const char* cli) {
  bool ok = true;
  int compared = 0;
  const auto dir = std::filesystem::temp_directory_path() / ("qkdnet_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < std::size(kDeterminismConfigs); ++i) {
    if (cli) {
      const auto cfg_path = dir / ("run" + std::to_string(i) + ".cfg");
      std::ofstream(cfg_path) << kDeterminismConfigs[i];
      for (const char* format : {"csv", "json"}) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
          const auto out = dir / ("out" + std::to_string(i) + "_" + std::to_string(rep) + "." + format);
          const std::string cmd = std::string("\"") + cli + "\" simulate --config \"" + cfg_path.string() +
                                  "\" --format " + format + " --out \"" + out.string() + "\"";
          if (std::system(cmd.c_str()) != 0) ok = false;
          outputs[rep] = slurp(out);
        }
        ok = ok && !outputs[0].empty() && outputs[0] == outputs[1];
        ++compared;
      }
    } else {
      const auto cfg = parse_config(kDeterminismConfigs[i]);
      std::string outputs[2];
      for (auto& o : outputs) {
        std::vector<MetricsRow> rows;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
          SessionOptions opts;
          opts.trial = t;
          rows.push_back({{}, run_session(cfg.protocol, cfg.channel, cfg.adversary, cfg.seed, opts).metrics});
        }
        o = render_metrics(rows, OutputFormat::csv);
      }
      ok = ok && outputs[0] == outputs[1];
      ++compared;
    }
  }
  std::filesystem::remove_all(dir);
  return {ok, fmt("%d repeated %s runs byte-identical: %s", compared, cli ? "qkdsim simulate" : "library",
                  ok ? "yes" : "NO")};
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"mutual unbiasedness", mutual_unbiasedness},
      {"Hadamard correctness", hadamard_correctness},
      {"Poisson claims", poisson_claims},
      {"balance and maximum", balance_and_maximum},
      {"honest-run correctness", honest_runs},
      {"efficiency limits", efficiency_limits},
      {"intercept-resend detection", intercept_resend_detection},
      {"EPR attack contrast", epr_contrast},
      {"PNS attack and alarm", pns_attack_and_alarm},
      {"determinism", [cli] { return determinism(cli); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("criterion %2zu %-28s %s  %s\n", i + 1, criteria[i].first, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
