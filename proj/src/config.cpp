#include "qkdnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qkdnet {

namespace {

const std::set<std::string, std::less<>> kRequired = {"d", "n_rounds", "p_bm", "p_cm", "p_d"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError(0, std::string(key),
                    "cannot parse '" + std::string(value) + "' as " + expected);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  std::string lower(v);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  bad_value(key, v, "a boolean");
}

/// Validation messages begin with the key name; recover it.
std::string leading_key(const std::string& message) {
  const auto end = message.find_first_of(" :");
  return message.substr(0, end);
}

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error((line > 0 ? "config line " + std::to_string(line) + ": " : std::string("config: ")) +
                         (key.empty() ? std::string() : "key '" + key + "': ") + message),
      line_(line),
      key_(std::move(key)),
      detail_(message) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "d",        "n_rounds",  "p_bm",       "p_cm",           "p_d",
      "p_cz",     "sample_fraction", "mu",   "eta_opt",        "eta_d",
      "adversary", "eve_channel_eta", "server_assisted_checks", "trojan_photons",
      "alarm_factor", "detection_margin", "seed", "trials"};
  return keys;
}

void ExperimentConfig::validate(bool allow_decoy_boundary) const {
  protocol.validate(allow_decoy_boundary);
  channel.validate();
  adversary.validate(protocol.d);
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (!(metrics.alarm_factor > 0.0)) throw std::invalid_argument("alarm_factor must be positive");
  if (!(metrics.detection_margin > 0.0)) throw std::invalid_argument("detection_margin must be positive");
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "d") cfg.protocol.d = to_int(key, value);
  else if (key == "n_rounds") cfg.protocol.n_rounds = to_u64(key, value);
  else if (key == "p_bm") cfg.protocol.p_bm = to_double(key, value);
  else if (key == "p_cm") cfg.protocol.p_cm = to_double(key, value);
  else if (key == "p_d") cfg.protocol.p_d = to_double(key, value);
  else if (key == "p_cz") cfg.protocol.p_cz = to_double(key, value);
  else if (key == "sample_fraction") cfg.protocol.sample_fraction = to_double(key, value);
  else if (key == "mu") {
    if (value == "none" || value == "ideal") cfg.channel.mu.reset();
    else cfg.channel.mu = to_double(key, value);
  }
  else if (key == "eta_opt") cfg.channel.eta_opt = to_double(key, value);
  else if (key == "eta_d") cfg.channel.eta_d = to_double(key, value);
  else if (key == "adversary") {
    const auto kind = parse_attack_kind(value);
    if (!kind) bad_value(key, value, "none, intercept_resend_z, intercept_resend_x, epr_server or pns_split");
    cfg.adversary.kind = *kind;
  }
  else if (key == "eve_channel_eta") cfg.adversary.eve_channel_eta = to_double(key, value);
  else if (key == "server_assisted_checks") cfg.adversary.server_assisted_checks = to_bool(key, value);
  else if (key == "trojan_photons") cfg.adversary.trojan_photons = static_cast<unsigned>(to_u64(key, value));
  else if (key == "alarm_factor") cfg.metrics.alarm_factor = to_double(key, value);
  else if (key == "detection_margin") cfg.metrics.detection_margin = to_double(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "trials") cfg.trials = to_u64(key, value);
  else throw ConfigError(0, std::string(key), "unknown key");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    if (value.empty()) throw ConfigError(line_no, std::string(key), "missing value");
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(line_no, std::string(key), "duplicate key (first set on line " + std::to_string(it->second) + ")");
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, e.key(), e.detail());
    }
    seen.emplace(std::string(key), line_no);
  }

  for (const auto& k : kRequired)
    if (!seen.contains(k)) throw ConfigError(0, k, "missing required key");

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    std::string key = leading_key(msg);
    const auto it = seen.find(key);
    throw ConfigError(it == seen.end() ? 0 : it->second, key, msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace qkdnet
