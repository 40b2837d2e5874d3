#include <CLI11.hpp>
#include <iostream>

#include "limcom_app/commands.hpp"

namespace app = limcom::app;

int main(int argc, char** argv) {
  CLI::App cli{"Optimal limited-commitment insurance contracts"};
  cli.require_subcommand(1);
  cli.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  int steps = 0;
  cli.add_option("--config", config_path, "flat key=value config file")->check(CLI::ExistingFile);
  cli.add_option("--set", sets, "override one config key (key=value), repeatable");
  cli.add_option("--out", out_dir, "output directory");
  auto* seed_opt = cli.add_option("--seed", seed, "RNG seed");
  auto* paths_opt = cli.add_option("--paths", paths, "Monte Carlo paths");
  auto* steps_opt = cli.add_option("--steps", steps, "time steps per simulated path");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"boundary", "solve the free boundary and write boundary.csv"},
      {"value", "write the premium / stopping-value surface and the dual value"},
      {"simulate", "simulate optimal contract paths and the Monte Carlo duality check"},
      {"first-best", "compare limited-commitment consumption with the first-best"},
      {"infinite", "infinite-horizon contract along a simulated path"},
      {"verify", "run all numerical cross-checks; exit 1 if any fails"},
  };
  for (const auto& [name, help] : commands) cli.add_subcommand(name, help);
  CLI11_PARSE(cli, argc, argv);

  try {
    app::RunConfig cfg;
    if (!config_path.empty()) app::load_config_file(cfg, config_path);
    for (const auto& s : sets) app::apply_assignment(cfg, s);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*paths_opt) cfg.paths = paths;
    if (*steps_opt) cfg.sim_steps = steps;

    const std::string cmd = cli.get_subcommands().front()->get_name();
    if (cmd == "boundary") return app::cmd_boundary(cfg, std::cout);
    if (cmd == "value") return app::cmd_value(cfg, std::cout);
    if (cmd == "simulate") return app::cmd_simulate(cfg, std::cout);
    if (cmd == "first-best") return app::cmd_first_best(cfg, std::cout);
    if (cmd == "infinite") return app::cmd_infinite(cfg, std::cout);
    return app::cmd_verify(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return app::exit_code_for(e);
  }
}
