#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stochlog/config.hpp"
#include "stochlog/fpe_solver.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

struct OutputFile {
  std::string name;
  std::string content;
};

/// Files produced by a command, held in memory until everything succeeded.
struct CommandOutput {
  std::vector<OutputFile> files;
  /// Diagnostics for stderr.
  std::vector<std::string> notes;

  void add(std::string name, std::string content);
  /// One-line plotting recipe naming the columns of a CSV.
  void add_recipe(const std::string& csv_name, const std::string& recipe);
};

/// `atom,<E>` line, then `y,p` rows for every node.
std::string transition_density_csv(const TransitionDensity& td);

/// The data series used by nll-surface and fit: the first simulated path
/// (surviving to T when require_survival is set) sampled every Delta.
ObservationSeries data_series(const ExperimentConfig& cfg, std::size_t* path_index = nullptr);

CommandOutput cmd_simulate(const ExperimentConfig& cfg);
CommandOutput cmd_fpe(const ExperimentConfig& cfg);
CommandOutput cmd_kernel(const ExperimentConfig& cfg);
CommandOutput cmd_nll_surface(const ExperimentConfig& cfg);
CommandOutput cmd_fit(const ExperimentConfig& cfg);
CommandOutput cmd_replicate(const ExperimentConfig& cfg);

const std::vector<std::string_view>& command_names();

/// Validates cfg, runs the named command and writes its files into
/// cfg.out_dir. Returns the process exit code (0 ok, 2 config, 3 numerical).
int run_command(std::string_view name, const ExperimentConfig& cfg, std::ostream& err);

}  // namespace stochlog
