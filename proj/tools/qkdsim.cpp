// qkdsim: run sessions from a config file, sweep one key, print Poisson
// tables, or self-check.
//
// Exit codes: 0 ok, 1 bad input / I/O, 2 `verify` found a failing check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdnet/config.hpp"
#include "qkdnet/report.hpp"
#include "qkdnet/session.hpp"
#include "qkdnet/verify.hpp"

namespace {

using namespace qkdnet;

struct OutputArgs {
  std::string out;
  std::string format = "csv";
};

void add_output(CLI::App* cmd, OutputArgs& o) {
  cmd->add_option("--out,-o", o.out, "write results here instead of stdout");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const std::string& text, const OutputArgs& o) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + o.out + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + o.out + "'");
}

std::vector<MetricsRow> run_trials(const ExperimentConfig& cfg, bool allow_boundary,
                                   std::vector<std::pair<std::string, std::string>> prefix) {
  std::vector<MetricsRow> rows;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    SessionOptions opts;
    opts.trial = t;
    opts.allow_decoy_boundary = allow_boundary;
    opts.metrics = cfg.metrics;
    const auto r = run_session(cfg.protocol, cfg.channel, cfg.adversary, cfg.seed, opts);
    auto labels = prefix;
    labels.emplace_back("trial", std::to_string(t));
    labels.emplace_back("seed", std::to_string(cfg.seed));
    labels.emplace_back("d", std::to_string(cfg.protocol.d));
    labels.emplace_back("n_rounds", std::to_string(cfg.protocol.n_rounds));
    rows.push_back({std::move(labels), r.metrics});
  }
  return rows;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for a three-party qudit QKD network cell"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  OutputArgs sim_out;
  auto* simulate = app.add_subcommand("simulate", "run the configured sessions");
  simulate->add_option("--config,-c", config_path, "experiment file")->required();
  simulate->add_option("--seed", seed_override, "override the config seed");
  add_output(simulate, sim_out);

  std::string sweep_key, sweep_values;
  OutputArgs sweep_out;
  auto* sweep = app.add_subcommand("sweep", "rerun the config over values of one key");
  sweep->add_option("--config,-c", config_path, "experiment file")->required();
  sweep->add_option("--key", sweep_key, "key to vary")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--seed", seed_override, "override the config seed");
  add_output(sweep, sweep_out);

  std::string mu_list = "0.01,0.05,0.1,0.5";
  int nmax = 3;
  OutputArgs table_out;
  auto* table = app.add_subcommand("poisson-table", "photon-number statistics of a faint pulse");
  table->add_option("--mu", mu_list, "comma-separated mean photon numbers");
  table->add_option("--nmax", nmax, "largest photon number column")->check(CLI::Range(0, 64));
  add_output(table, table_out);

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "fast invariant checks");
  verify->add_option("--seed", verify_seed, "seed for the sampled checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage error maps to 1.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      auto cfg = load_config(config_path);
      if (seed_override) cfg.seed = *seed_override;
      emit(render_metrics(run_trials(cfg, false, {}), *parse_output_format(sim_out.format)), sim_out);
    } else if (*sweep) {
      const auto base = load_config(config_path);
      std::vector<MetricsRow> rows;
      for (const auto& v : split_list(sweep_values)) {
        auto cfg = base;
        if (seed_override) cfg.seed = *seed_override;
        try {
          set_config_value(cfg, sweep_key, v);
          // Sweeps may walk p_d up to its analytic boundary.
          cfg.validate(true);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(0, sweep_key, std::string(e.what()) + " (value " + v + ")");
        }
        auto part = run_trials(cfg, true, {{"sweep_key", sweep_key}, {"sweep_value", v}});
        rows.insert(rows.end(), part.begin(), part.end());
      }
      emit(render_metrics(rows, *parse_output_format(sweep_out.format)), sweep_out);
    } else if (*table) {
      std::vector<double> mus;
      for (const auto& s : split_list(mu_list)) {
        std::size_t used = 0;
        double mu = 0.0;
        try {
          mu = std::stod(s, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != s.size() || !(mu >= 0.0)) throw std::invalid_argument("--mu: bad value '" + s + "'");
        mus.push_back(mu);
      }
      emit(render_poisson_table(poisson_table(mus, nmax), *parse_output_format(table_out.format)), table_out);
    } else if (*verify) {
      bool all = true;
      for (const auto& c : run_verification(verify_seed)) {
        std::printf("%-28s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
        all = all && c.pass;
      }
      return all ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "qkdsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
