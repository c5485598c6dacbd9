#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "codedmr/commands.hpp"
#include "codedmr/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::string output;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output", opt.output, "write results here instead of stdout");
  cmd->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opt.seed, "master seed (overrides config)");
  cmd->add_option("--trials", opt.trials, "Monte Carlo trials (overrides config)");
  cmd->add_option("--mode", opt.mode, "analytic or concrete (overrides config)")
      ->check(CLI::IsMember({"analytic", "concrete"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded Map-Shuffle-Reduce delay analysis and simulation"};
  app.require_subcommand(1);
  Options opt;
  auto* analyze = app.add_subcommand("analyze", "delays per scheme for every q in [q_min, K]");
  auto* optimize = app.add_subcommand("optimize", "optimal q, r1, r2 per scheme");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo Map delay and end-to-end runs");
  auto* sweep = app.add_subcommand("sweep", "delays over a sweep of q, d or alpha");
  for (auto* cmd : {analyze, optimize, simulate, sweep}) add_common(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    codedmr::RunConfig cfg = codedmr::load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.mode) cfg.mode = codedmr::parse_mode(*opt.mode);
    const auto fmt = codedmr::parse_format(opt.format);

    std::ostringstream buffer;
    if (*analyze)
      codedmr::cmd_analyze(cfg, fmt, buffer);
    else if (*optimize)
      codedmr::cmd_optimize(cfg, fmt, buffer);
    else if (*simulate)
      codedmr::cmd_simulate(cfg, fmt, buffer);
    else
      codedmr::cmd_sweep(cfg, fmt, buffer);

    if (opt.output.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream out(opt.output);
      if (!out) throw codedmr::InvalidConfig("cannot write " + opt.output);
      out << buffer.str();
    }
    return 0;
  } catch (const codedmr::InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const codedmr::InfeasibleConfig& e) {
    std::cerr << "infeasible configuration: " << e.what() << '\n';
    return 2;
  } catch (const codedmr::InfeasibleBatching& e) {
    std::cerr << "infeasible configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
