#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stochlog/likelihood.hpp"
#include "stochlog/model.hpp"
#include "stochlog/parallel.hpp"
#include "stochlog/sde_sim.hpp"

namespace stochlog {

enum class Positivity { none, log_space };

struct OptimOptions {
  /// Initial simplex offsets per coordinate (in log units under log_space).
  /// Empty: 0.1 in log space, 0.1 max(1, |x_i|) otherwise.
  std::vector<double> initial_scale;
  std::size_t max_evals = 2000;
  /// Stop once the simplex value spread is <= f_abs_tol + f_rel_tol |f_best|
  /// and every vertex lies within x_tol of the best one in each coordinate.
  double f_abs_tol = 1e-10;
  double f_rel_tol = 1e-12;
  double x_tol = 1e-8;
  Positivity positivity = Positivity::log_space;
  bool keep_trace = true;

  void validate(std::size_t dim) const;
};

struct TracePoint {
  std::vector<double> x;
  double value;
};

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t n_evals = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead with coefficients (1, 2, 0.5, 0.5). Under log_space the
/// search runs over u = log x, so every evaluated point is positive; x_tol
/// then applies to u. Throws NumericalError when the objective returns NaN.
OptimResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimOptions& opts);

/// Parameters free during a fit; the rest stay at their initial value.
struct ParamMask {
  bool lambda = true;
  bool mu = true;
  bool alpha = false;
  bool rho = false;

  std::size_t size() const;
  std::vector<double> pack(const Params& p) const;
  Params unpack(std::span<const double> free, const Params& base) const;
};

struct FitResult {
  Params theta_hat = Params::reference_scenario();
  double nll = 0.0;
  std::size_t n_evaluations = 0;
  bool converged = false;
  /// Absorbed series whose extinction came before it reached half the
  /// fitted carrying capacity (or a subcritical fit).
  bool low_information = false;
  std::vector<std::string> warnings;
  /// Every evaluation as (free parameters, nll).
  std::vector<TracePoint> trace;
};

FitResult fit(const ObservationSeries& obs, const LikelihoodSettings& settings, const Params& theta_init,
              const OptimOptions& opts, const ParamMask& mask = {});

enum class ExtinctionClass { never, transient, after_stationarity };

std::string_view to_string(ExtinctionClass c);

/// never: the path survives. transient: extinct before first reaching K/2.
/// after_stationarity: extinct after reaching K/2.
ExtinctionClass classify_extinction(std::span<const double> states, double K);

struct ReplicateScenario {
  Params truth = Params::reference_scenario();
  double x0 = 0.25;
  double horizon = 10.0;
  /// Euler step of the simulated data.
  double delta_sim = 1e-3;
  double delta_obs = 0.05;
  /// Transitions per series; observations cover [0, M delta_obs].
  std::size_t M = 200;
  LikelihoodSettings likelihood;
  Params theta_init = Params(15.0, 13.0, 1.0, 0.1);
  OptimOptions optim;
  ParamMask mask;

  void validate() const;
};

struct ReplicateRow {
  std::size_t rep = 0;
  ExtinctionClass extinction = ExtinctionClass::never;
  std::optional<FitResult> fit;
  std::string error;
};

/// Series rep r is simulate_em(truth, x0, horizon, delta_sim, master_seed, r)
/// sampled every delta_obs. Failed fits are recorded in their row.
std::vector<ReplicateRow> replicate(const ReplicateScenario& sc, std::size_t n_reps, std::uint64_t master_seed,
                                    Exec exec = Exec::parallel);

/// Observation series of replicate r.
ObservationSeries replicate_series(const ReplicateScenario& sc, std::uint64_t master_seed, std::size_t rep,
                                   ExtinctionClass* cls = nullptr);

}  // namespace stochlog
