#include "qkdnet/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "qkdnet/metrics.hpp"
#include "qkdnet/qudit.hpp"
#include "qkdnet/report.hpp"
#include "qkdnet/session.hpp"

namespace qkdnet {

namespace {

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

/// |observed - expected| within k binomial standard deviations.
bool within_sigma(double observed, double p, double n, double k = 3.0) {
  return std::abs(observed - p) <= k * std::sqrt(p * (1.0 - p) / n) + 1e-12;
}

VerifyCheck mub_overlap() {
  double worst = 0.0;
  for (int d = 2; d <= 16; ++d)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) worst = std::max(worst, std::abs(overlap_probability(d, k, l) - 1.0 / d));
  return {"mub_overlap", worst <= kScalarTolerance, fmt("max |overlap - 1/d| = %.3g%.0s", worst, 0)};
}

VerifyCheck hadamard_maps_basis() {
  double worst = 0.0;
  for (int d = 2; d <= 16; ++d) {
    const auto h = hadamard(d);
    worst = std::max(worst, max_abs_diff(h * h.adjoint(), identity_op(d)));
    for (int j = 0; j < d; ++j) {
      const auto got = apply(h, basis_state(d, j));
      const auto want = x_basis_state(d, j);
      for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    }
  }
  return {"hadamard", worst <= kStateTolerance, fmt("max deviation = %.3g%.0s", worst, 0)};
}

VerifyCheck shift_group_law() {
  double worst = 0.0;
  for (int d = 2; d <= 8; ++d)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        worst = std::max(worst, max_abs_diff(shift_op(d, a) * shift_op(d, b), shift_op(d, (a + b) % d)));
  return {"shift_group_law", worst <= kScalarTolerance, fmt("max deviation = %.3g%.0s", worst, 0)};
}

VerifyCheck poisson_sums() {
  double worst = 0.0;
  for (double mu : {0.01, 0.05, 0.5, 2.0}) {
    double s = 0.0;
    for (int n = 0; n < 60; ++n) s += poisson_pmf(n, mu);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  const double m = multi_photon_given_nonempty(0.05);
  const bool bound = m < 0.05 / 2.0 && m > 0.05 / 2.0 - 0.05 * 0.05 / 6.0 - 1e-12;
  return {"poisson", worst <= 1e-12 && bound, fmt("normalization error %.3g, P(n>1|n>0, 0.05) = %.9g", worst, m)};
}

VerifyCheck balance_point() {
  bool ok = true;
  for (double pd : {0.1, 0.25, 0.4}) {
    const auto b = balance(pd);
    ok = ok && std::abs((1.0 - pd) * b.p_cz - pd * (1.0 - b.p_cz)) < 1e-15 &&
         std::abs(useful_check_probability(pd, b.p_cz) - b.p_eu) < 1e-15;
  }
  return {"balance", ok, ok ? "p_cz = p_d balances Z and X checks" : "balance equation violated"};
}

SessionResult honest(int d, std::uint64_t seed, Execution ex) {
  ProtocolConfig p;
  p.d = d;
  p.n_rounds = 4000;
  p.p_d = 0.2;
  SessionOptions o;
  o.execution = ex;
  return run_session(p, ChannelConfig{}, AdversaryStrategy{}, seed, o);
}

VerifyCheck honest_sessions(std::uint64_t seed) {
  std::string detail;
  bool ok = true;
  for (int d : {2, 3, 4, 8}) {
    const auto r = honest(d, seed, Execution::parallel);
    const auto& m = r.metrics;
    const bool clean = m.key_length > 0 && m.key_mismatches == 0 && m.qber_z.value_or(0.0) == 0.0 &&
                       m.qber_x.value_or(0.0) == 0.0 && m.qber_upstream.value_or(0.0) == 0.0;
    ok = ok && clean;
    detail += "d=" + std::to_string(d) + (clean ? " ok " : " FAILED ");
  }
  return {"honest_sessions", ok, detail};
}

VerifyCheck serial_matches_parallel(std::uint64_t seed) {
  const bool same = honest(4, seed, Execution::serial) == honest(4, seed, Execution::parallel);
  return {"serial_equals_parallel", same, same ? "identical session results" : "results differ"};
}

VerifyCheck intercept_resend_x_qber(std::uint64_t seed) {
  ProtocolConfig p;
  p.d = 2;
  p.p_d = 0.4;
  p.p_cm = 0.1;
  p.n_rounds = 20000;
  AdversaryStrategy eve;
  eve.kind = AttackKind::intercept_resend_z;
  const auto r = run_session(p, ChannelConfig{}, eve, seed);
  const auto n = static_cast<double>(r.checks.x_checks.size());
  const double q = r.metrics.qber_x.value_or(-1.0);
  const bool ok = n > 0 && within_sigma(q, 0.5, n) && r.metrics.qber_z.value_or(0.0) == 0.0;
  return {"intercept_resend_decoy_qber", ok, fmt("decoy X QBER %.4f over %.0f checks", q, n)};
}

VerifyCheck useful_check_rate(std::uint64_t seed) {
  ProtocolConfig p;
  p.d = 2;
  p.p_d = 0.3;
  p.n_rounds = 20000;
  const auto r = run_session(p, ChannelConfig{}, AdversaryStrategy{}, seed);
  const double expected = balance(0.3).p_eu;
  const double got = r.metrics.p_eu_empirical.value_or(-1.0);
  const double n = static_cast<double>(r.metrics.useful_z_checks + r.metrics.useful_x_checks) / std::max(got, 1e-12);
  return {"useful_check_rate", within_sigma(got, expected, n), fmt("p_eu %.4f vs %.4f", got, expected)};
}

}  // namespace

std::vector<VerifyCheck> run_verification(std::uint64_t seed) {
  std::vector<std::function<VerifyCheck()>> checks = {
      mub_overlap,
      hadamard_maps_basis,
      shift_group_law,
      poisson_sums,
      balance_point,
      [seed] { return honest_sessions(seed); },
      [seed] { return serial_matches_parallel(seed); },
      [seed] { return intercept_resend_x_qber(seed); },
      [seed] { return useful_check_rate(seed); },
  };
  std::vector<VerifyCheck> out;
  for (auto& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"exception", false, e.what()});
    }
  }
  return out;
}

}  // namespace qkdnet
