#pragma once

// Flat `key = value` experiment files:
//
//   # comment
//   d = 2
//   n_rounds = 100000
//   p_bm = 0.9
//   ...
//
// Required: d, n_rounds, p_bm, p_cm, p_d. Everything else has a default
// (see README). Errors carry the 1-based line number and the key.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdnet/adversary.hpp"
#include "qkdnet/metrics.hpp"
#include "qkdnet/protocol.hpp"
#include "qkdnet/pulse_channel.hpp"

namespace qkdnet {

struct ExperimentConfig {
  ProtocolConfig protocol;
  ChannelConfig channel;
  AdversaryStrategy adversary;
  MetricsOptions metrics;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  std::string output_path;

  /// Validates every section; messages start with the offending key.
  void validate(bool allow_decoy_boundary = false) const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);

  /// 0 when the problem is not tied to a line (e.g. a missing key).
  int line() const { return line_; }
  const std::string& key() const { return key_; }
  /// The message without the line/key prefix.
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  std::string key_;
  std::string detail_;
};

/// Every key parse_config accepts.
const std::vector<std::string>& config_keys();

/// Assigns one key from its textual value. Throws ConfigError (line 0) on an
/// unknown key or an unparsable value; does not range-check.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a file; I/O failures throw std::runtime_error.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace qkdnet
