#include <gtest/gtest.h>

#include "qkdnet/config.hpp"

using namespace qkdnet;

namespace {

const char* kMinimal =
    "d = 4\n"
    "n_rounds = 1000\n"
    "p_bm = 0.6\n"
    "p_cm = 0.7\n"
    "p_d = 0.2\n";

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ConfigError(0, "", "");
}

}  // namespace

TEST(Config, MinimalWithDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.protocol.d, 4);
  EXPECT_EQ(c.protocol.n_rounds, 1000u);
  EXPECT_DOUBLE_EQ(c.protocol.p_cm, 0.7);
  EXPECT_FALSE(c.channel.mu);
  EXPECT_EQ(c.adversary.kind, AttackKind::none);
  EXPECT_EQ(c.trials, 1u);
  EXPECT_DOUBLE_EQ(c.protocol.effective_p_cz(), 0.2);
}

TEST(Config, AllKeysAndComments) {
  const std::string text = std::string(kMinimal) +
                           "# a comment line\n"
                           "p_cz = 0.3   # trailing comment\n"
                           "sample_fraction = 0.1\n"
                           "mu = 0.05\n"
                           "eta_opt = 0.5\n"
                           "eta_d = 0.9\n"
                           "adversary = PNS_SPLIT\n"
                           "eve_channel_eta = 0.8\n"
                           "server_assisted_checks = false\n"
                           "trojan_photons = 2\n"
                           "alarm_factor = 5\n"
                           "detection_margin = 20\n"
                           "\n"
                           "seed = 42\n"
                           "trials = 3\n";
  const auto c = parse_config(text);
  EXPECT_EQ(c.protocol.p_cz, 0.3);
  EXPECT_EQ(c.channel.mu, 0.05);
  EXPECT_EQ(c.adversary.kind, AttackKind::pns_split);
  EXPECT_EQ(c.adversary.trojan_photons, 2u);
  EXPECT_DOUBLE_EQ(c.metrics.alarm_factor, 5.0);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.trials, 3u);
  EXPECT_EQ(config_keys().size(), 18u);
}

TEST(Config, MuAcceptsIdeal) {
  EXPECT_FALSE(parse_config(std::string(kMinimal) + "mu = ideal\n").channel.mu);
}

TEST(Config, ErrorsCarryLineAndKey) {
  auto e = parse_error(std::string(kMinimal) + "p_cz = lots\n");
  EXPECT_EQ(e.line(), 6);
  EXPECT_EQ(e.key(), "p_cz");

  e = parse_error("d = 2\nn_rounds = 10\np_bm = 0.5\np_cm = 0.5\np_d = 0.5\n");
  EXPECT_EQ(e.line(), 5);
  EXPECT_EQ(e.key(), "p_d");
  EXPECT_NE(std::string(e.what()).find("config line 5: key 'p_d'"), std::string::npos);

  e = parse_error(std::string(kMinimal) + "colour = blue\n");
  EXPECT_EQ(e.line(), 6);
  EXPECT_EQ(e.key(), "colour");

  e = parse_error(std::string(kMinimal) + "d = 3\n");
  EXPECT_EQ(e.line(), 6);

  e = parse_error("d = 2\nn_rounds = 10\n");
  EXPECT_EQ(e.line(), 0);

  e = parse_error(std::string(kMinimal) + "just words\n");
  EXPECT_EQ(e.line(), 6);

  e = parse_error(std::string(kMinimal) + "eta_opt = 1.2\n");
  EXPECT_EQ(e.key(), "eta_opt");
  EXPECT_EQ(e.line(), 6);
}

TEST(Config, QubitOnlyAttackRejectedForQudits) {
  const auto e = parse_error(std::string(kMinimal) + "adversary = epr_server\n");
  EXPECT_EQ(e.key(), "adversary");
  EXPECT_NE(std::string(e.what()).find("requires d = 2"), std::string::npos);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/qkd.cfg"), std::runtime_error);
}
