#include "disloc/harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace disloc;

int main(int argc, char** argv) {
  CLI::App app{"Dislocation energy toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool check_burgers = false;
  app.add_option("--config", config_path, "key = value run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides `out`)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides `seed`)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = all cores (overrides `threads`)")
                          ->check(CLI::NonNegativeNumber);
  app.add_flag("--check-burgers", check_burgers, "phi: also check the Burgers condition");
  for (const std::string& name : harness::command_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    harness::RunConfig cfg = harness::RunConfig::load(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (*threads_opt) cfg.threads = threads;
    const std::string name = app.get_subcommands().front()->get_name();
    const harness::ResultRecord rec = harness::run_command(name, cfg, {check_burgers});
    std::cout << rec.to_json();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}
