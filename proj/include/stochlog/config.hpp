#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochlog/estimator.hpp"
#include "stochlog/fpe_solver.hpp"
#include "stochlog/likelihood.hpp"
#include "stochlog/model.hpp"

namespace stochlog {

/// `block.key = value` lines; `#` starts a comment. Duplicate keys and
/// malformed lines are ConfigErrors naming the line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

struct ExperimentConfig {
  // model
  double lambda = 20.0;
  double mu = 18.0;
  double alpha = 1.0;
  double rho = 0.1;
  double x0 = 0.25;
  double T = 10.0;
  // simulation
  double h = 1e-3;
  double delta = 1e-3;
  std::size_t n_paths = 200;
  std::optional<double> x_L;
  std::uint64_t seed = 1;
  /// Trajectory CSV keeps every output_stride-th Euler step.
  std::size_t output_stride = 10;
  // observation
  double Delta = 0.05;
  std::size_t M = 200;
  /// Use the first simulated path that survives to T as the data series.
  bool require_survival = true;
  // likelihood
  Backend backend = Backend::fd;
  /// Particles per Monte Carlo kernel estimate.
  std::size_t n_particles = 500;
  double floor = 1e-300;
  // kernel comparison
  double kernel_x = 0.25;
  double kernel_Delta = 1.0;
  std::vector<double> kernel_y{0.0, 1.5, 2.0, 2.5};
  std::size_t kernel_replicates = 200;
  std::vector<std::string> kernel_methods{"fd", "pedersen", "bridge-plain", "bridge-modified", "nonparametric"};
  // fpe
  std::size_t fpe_snapshot_every = 100;
  std::size_t fpe_node_stride = 10;
  // nll surface
  double surface_lambda_min = 16.0;
  double surface_lambda_max = 24.0;
  std::size_t surface_lambda_n = 11;
  double surface_mu_min = 14.0;
  double surface_mu_max = 22.0;
  std::size_t surface_mu_n = 11;
  // fit
  double fit_lambda0 = 15.0;
  double fit_mu0 = 13.0;
  double optim_initial_scale = 0.1;
  std::size_t optim_max_evals = 400;
  double optim_f_abs_tol = 1e-6;
  double optim_f_rel_tol = 1e-12;
  double optim_x_tol = 1e-4;
  // replicate
  std::size_t n_reps = 100;
  // output
  std::filesystem::path out_dir = "out";

  static ExperimentConfig from_key_values(const std::map<std::string, std::string>& kv);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  /// Every constraint the commands rely on; throws ConfigError.
  void validate() const;

  Params params() const { return Params(lambda, mu, alpha, rho); }
  Grid grid() const { return Grid::covering(params(), x0, h, x_L); }
  LikelihoodSettings likelihood() const;
  OptimOptions optim() const;
  ReplicateScenario scenario() const;
};

}  // namespace stochlog
