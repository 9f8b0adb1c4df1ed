#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stochlog/commands.hpp"
#include "stochlog/config.hpp"
#include "stochlog/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic logistic growth with extinction: simulation, transition kernels, likelihood fits"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "Config file of block.key = value lines")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed (overrides simulation.seed)");
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  for (std::string_view name : stochlog::command_names()) app.add_subcommand(std::string(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  stochlog::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = stochlog::ExperimentConfig::from_file(config_path);
  } catch (const stochlog::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return stochlog::run_command(app.get_subcommands().front()->get_name(), cfg, std::cerr);
}
