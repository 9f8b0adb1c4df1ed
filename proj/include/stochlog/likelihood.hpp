#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stochlog/fpe_solver.hpp"
#include "stochlog/model.hpp"
#include "stochlog/parallel.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

enum class Backend { fd, pedersen, bridge_plain, bridge_modified, nonparametric };

std::string_view to_string(Backend b);
/// Accepts fd, pedersen, bridge-plain, bridge-modified, nonparametric.
Backend parse_backend(std::string_view name);

struct LikelihoodSettings {
  Backend backend = Backend::fd;
  /// Grid step (fd).
  double h = 1e-3;
  /// Lower bound for the grid extent (fd). The grid always reaches
  /// max(4K, 2 max obs) for the parameter under evaluation.
  std::optional<double> x_upper;
  double delta = 1e-3;
  /// Paths per transition (Monte Carlo backends).
  std::size_t n_paths = 500;
  std::uint64_t seed = 0;
  /// Values below this are replaced by it before taking logs.
  double floor = 1e-300;
  Exec exec = Exec::parallel;

  void validate(double delta_obs) const;
};

/// Grid used by the fd backend for parameter p and observations up to max_obs.
Grid likelihood_grid(const Params& p, double max_obs, const LikelihoodSettings& s);

/// q(y | x) after delta_obs with respect to delta_0 + Lebesgue. The stream
/// index keeps Monte Carlo transitions on independent random numbers.
double transition_term(const Params& theta, double x, double y, double delta_obs, const LikelihoodSettings& s,
                       std::uint64_t stream = 0);

struct TermValue {
  double density;
  double neg_log;
  bool floored;
};

struct NllResult {
  double value = 0.0;
  std::vector<TermValue> terms;
  std::size_t n_floored = 0;
};

/// -sum_k log max(q(xi_{k+1} | xi_k), floor). The initial state is known, so
/// no initial-law factor enters.
NllResult neg_log_likelihood(const Params& theta, const ObservationSeries& obs, const LikelihoodSettings& s);

}  // namespace stochlog
