#include "qkdnet/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qkdnet/pulse_channel.hpp"

namespace qkdnet {

namespace {

using Json = nlohmann::ordered_json;

Json json_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

/// Column values in metrics_columns() order.
std::vector<std::pair<std::string, Json>> metric_fields(const SessionMetrics& m) {
  return {
      {"key_length", m.key_length},
      {"key_bits", m.key_bits},
      {"key_mismatches", m.key_mismatches},
      {"qber_z", json_number(m.qber_z)},
      {"qber_x", json_number(m.qber_x)},
      {"qber_upstream", json_number(m.qber_upstream)},
      {"eta_q", json_number(m.eta_q)},
      {"eta_t", json_number(m.eta_t)},
      {"eta_q_overall", json_number(m.eta_q_overall)},
      {"eta_t_overall", json_number(m.eta_t_overall)},
      {"useful_z_checks", m.useful_z_checks},
      {"useful_x_checks", m.useful_x_checks},
      {"p_eu_empirical", json_number(m.p_eu_empirical)},
      {"p_eu_expected", m.p_eu_expected},
      {"p_cu", m.p_cu},
      {"multi_photon_expected", m.multi_photon_expected},
      {"pns_condition_pass", m.pns_condition_pass},
      {"multi_photon_rate_source", json_number(m.multi_photon_rate_source)},
      {"multi_photon_rate", json_number(m.multi_photon_rate)},
      {"pns_alarm", m.pns_alarm},
      {"charlie_click_rate", json_number(m.charlie_click_rate)},
      {"eve_info", json_number(m.eve_info)},
  };
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.get<std::string>();
}

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_number(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> out;
    for (auto& [name, value] : metric_fields(SessionMetrics{})) out.push_back(name);
    return out;
  }();
  return cols;
}

std::string render_metrics(const std::vector<MetricsRow>& rows, OutputFormat format) {
  if (format == OutputFormat::json) {
    Json arr = Json::array();
    for (const auto& row : rows) {
      Json obj = Json::object();
      for (const auto& [k, v] : row.labels) obj[k] = v;
      Json metrics = Json::object();
      for (auto& [k, v] : metric_fields(row.metrics)) metrics[k] = std::move(v);
      obj["metrics"] = std::move(metrics);
      arr.push_back(std::move(obj));
    }
    return Json{{"rows", std::move(arr)}}.dump(2) + "\n";
  }

  std::ostringstream out;
  if (!rows.empty()) {
    bool first = true;
    for (const auto& [k, v] : rows.front().labels) {
      out << (first ? "" : ",") << k;
      first = false;
    }
    for (const auto& c : metrics_columns()) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\n';
  }
  for (const auto& row : rows) {
    bool first = true;
    for (const auto& [k, v] : row.labels) {
      out << (first ? "" : ",") << v;
      first = false;
    }
    for (const auto& [k, v] : metric_fields(row.metrics)) {
      out << (first ? "" : ",") << csv_cell(v);
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<PoissonRow> poisson_table(const std::vector<double>& mus, int nmax) {
  if (nmax < 0) throw std::invalid_argument("nmax must be >= 0");
  std::vector<PoissonRow> rows;
  for (double mu : mus) {
    PoissonRow r;
    r.mu = mu;
    for (int n = 0; n <= nmax; ++n) r.pmf.push_back(poisson_pmf(n, mu));
    if (mu > 0.0) r.multi_given_nonempty = multi_photon_given_nonempty(mu);
    r.half_mu = mu / 2.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_poisson_table(const std::vector<PoissonRow>& rows, OutputFormat format) {
  const std::size_t width = rows.empty() ? 0 : rows.front().pmf.size();
  if (format == OutputFormat::json) {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json obj = Json::object();
      obj["mu"] = r.mu;
      for (std::size_t n = 0; n < r.pmf.size(); ++n) obj["p" + std::to_string(n)] = r.pmf[n];
      obj["p_multi_given_nonempty"] = json_number(r.multi_given_nonempty);
      obj["mu_over_2"] = r.half_mu;
      arr.push_back(std::move(obj));
    }
    return Json{{"rows", std::move(arr)}}.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "mu";
  for (std::size_t n = 0; n < width; ++n) out << ",p" << n;
  out << ",p_multi_given_nonempty,mu_over_2\n";
  for (const auto& r : rows) {
    out << format_number(r.mu);
    for (double p : r.pmf) out << ',' << format_number(p);
    out << ',' << format_number(r.multi_given_nonempty) << ',' << format_number(r.half_mu) << '\n';
  }
  return out.str();
}

}  // namespace qkdnet
